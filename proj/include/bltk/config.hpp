#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "bltk/errors.hpp"

namespace bltk {

// Runtime knobs shared by every module. A config file (key = value lines,
// '#' comments) can override the defaults; CLI flags override the file.
// BLTK_CONFIG in the environment points at a default config file.
struct Config {
  double ode_tol = 1e-10;        // local error per accepted ODE step
  double quad_tol = 1e-10;       // absolute quadrature error target
  double branch_min_abs = 1e-12; // |A| floor before branch tracking aborts
  int newton_max_iter = 50;
  int quadrisect_max_depth = 40;
  double box_min_size = 1e-9;    // boxes below this report clusters
  int proximity_panels = 64;     // base panels for circle averages
  double proximity_rel_err = 1e-4;
  double logplus_cap = std::log(1e8); // cap for integrable log spikes
  double radii_ratio = 1.4142135623730951;
  double rmax = 40.0;
  unsigned seed = 20240811;
  unsigned jobs = 0;             // 0 = all hardware threads
  int picard_max_iter = 50;
  double picard_tol = 1e-12;
  double picard_grid_step = 1e-3;
  double burn_in = 0.25;         // fraction of arc length dropped by fits
  double decay_r2_threshold = 0.99;
  // \int_1^inf dt/(t e^t), precomputed once by adaptive quadrature.
  double exp_integral_const = 0.21938393439552027;

  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  static Config from_environment();
};

inline void Config::set(const std::string& key, const std::string& value) {
  auto d = [&] { return std::stod(value); };
  if (key == "ode_tol") ode_tol = d();
  else if (key == "quad_tol") quad_tol = d();
  else if (key == "branch_min_abs") branch_min_abs = d();
  else if (key == "newton_max_iter") newton_max_iter = static_cast<int>(d());
  else if (key == "quadrisect_max_depth") quadrisect_max_depth = static_cast<int>(d());
  else if (key == "box_min_size") box_min_size = d();
  else if (key == "proximity_panels") proximity_panels = static_cast<int>(d());
  else if (key == "proximity_rel_err") proximity_rel_err = d();
  else if (key == "logplus_cap") logplus_cap = d();
  else if (key == "radii_ratio") radii_ratio = d();
  else if (key == "rmax") rmax = d();
  else if (key == "seed") seed = static_cast<unsigned>(d());
  else if (key == "jobs") jobs = static_cast<unsigned>(d());
  else if (key == "picard_max_iter") picard_max_iter = static_cast<int>(d());
  else if (key == "picard_tol") picard_tol = d();
  else if (key == "picard_grid_step") picard_grid_step = d();
  else if (key == "burn_in") burn_in = d();
  else if (key == "decay_r2_threshold") decay_r2_threshold = d();
  else if (key == "exp_integral_const") exp_integral_const = d();
  else throw ParseError("unknown config key '" + key + "'", 0);
}

inline void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!key.empty()) set(key, value);
  }
}

inline Config Config::from_environment() {
  Config cfg;
  if (const char* p = std::getenv("BLTK_CONFIG")) cfg.load_file(p);
  return cfg;
}

}  // namespace bltk
