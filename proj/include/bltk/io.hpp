#pragma once

// Serialization of the toolkit's result types: JSON for reports and
// machine consumption, CSV for plot data. Complex values appear as
// {"re": ..., "im": ...} in JSON and as paired .re/.im columns in CSV.

#include <sstream>
#include <string>

#include "json.hpp"

#include "bltk/asymptotics.hpp"
#include "bltk/banklaine.hpp"
#include "bltk/gallery.hpp"
#include "bltk/nevanlinna.hpp"
#include "bltk/ode.hpp"
#include "bltk/zeros.hpp"

namespace bltk::io {

using nlohmann::json;

inline json cjson(Cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const zeros::ZeroRecord& r) {
  return json{{"location", cjson(r.location)},
              {"multiplicity", r.multiplicity},
              {"residual", r.residual},
              {"clustered", r.clustered}};
}

inline json to_json(const std::vector<zeros::ZeroRecord>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

inline json to_json(const banklaine::VerifyReport& rep) {
  json zs = json::array(), signs = json::array();
  for (const auto& z : rep.zeros) {
    zs.push_back({{"location", cjson(z.location)},
                  {"multiplicity", z.multiplicity},
                  {"derivative", cjson(z.derivative)},
                  {"sign_error", z.sign_error}});
    signs.push_back(z.sign);
  }
  return json{{"zeros", zs},
              {"signs", signs},
              {"is_bank_laine", rep.is_bank_laine},
              {"is_special", rep.is_special},
              {"max_sign_error", rep.max_sign_error},
              {"max_abs_error", rep.max_abs_error},
              {"failure", rep.failure}};
}

inline json to_json(const asym::DecayReport& rep) {
  return json{{"model", rep.model == asym::DecayModel::PowerLaw ? "power-law" : "exponential"},
              {"model_r2", rep.model_r2},
              {"fitted_rate", rep.fitted_rate},
              {"verdict", rep.verdict},
              {"wronskian_drift", rep.wronskian_drift},
              {"total_steps", rep.total_steps},
              {"samples", rep.samples.size()}};
}

inline json to_json(const asym::PicardSolution& sol) {
  json xs = json::array(), us = json::array(), vs = json::array();
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
    xs.push_back(sol.x_grid[i]);
    us.push_back(cjson(sol.u_values[i]));
    vs.push_back(cjson(sol.v_values[i]));
  }
  return json{{"x_grid", xs},
              {"u", us},
              {"v", vs},
              {"iterations", sol.iterations},
              {"contraction_bound", sol.contraction_bound},
              {"observed_ratio", sol.observed_ratio},
              {"residual", sol.residual},
              {"cutoff", sol.cutoff}};
}

inline json to_json(const nevan::NevanProfile& p) {
  return json{{"radii", p.radii},
              {"m", p.m_values},
              {"N", p.N_values},
              {"T", p.T_values},
              {"target", p.target.is_inf ? json("inf") : cjson(p.target.a)},
              {"order", p.fitted_order},
              {"lambda", p.fitted_lambda},
              {"lambda_zero_free", p.lambda_zero_free},
              {"delta", p.delta_estimate},
              {"delta_trend", p.delta_trend},
              {"wronskian_drift", p.wronskian_drift},
              {"semantics", "finite-range estimate"}};
}

inline json to_json(const gallery::EntryReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back(
        {{"what", c.what}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
  return json{{"name", rep.name}, {"pass", rep.pass}, {"checks", checks}};
}

// ---- CSV ----

inline std::string csv(const contour::OdeTrajectory& tr) {
  std::ostringstream os;
  os.precision(17);
  os << "z.re,z.im,y.re,y.im,dy.re,dy.im,step_error\n";
  for (const auto& n : tr.nodes)
    os << n.z.real() << ',' << n.z.imag() << ',' << n.y[0].real() << ',' << n.y[0].imag()
       << ',' << n.y[1].real() << ',' << n.y[1].imag() << ',' << n.step_error << '\n';
  return os.str();
}

inline std::string csv(const zeros::CountingData& cd) {
  std::ostringstream os;
  os.precision(17);
  os << "r,n,N\n";
  for (std::size_t i = 0; i < cd.radii.size(); ++i)
    os << cd.radii[i] << ',' << cd.n_values[i] << ',' << cd.N_values[i] << '\n';
  return os.str();
}

inline std::string csv(const nevan::NevanProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "r,m,N,T\n";
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    os << p.radii[i] << ',' << p.m_values[i] << ',' << p.N_values[i] << ','
       << p.T_values[i] << '\n';
  return os.str();
}

inline std::string csv(const asym::DecayReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "s,z.re,z.im,envelope,envelope_basis\n";
  for (const auto& s : rep.samples)
    os << s.s << ',' << s.z.real() << ',' << s.z.imag() << ',' << s.env << ','
       << s.env_basis << '\n';
  return os.str();
}

inline std::string csv(const asym::TraceResult& res) {
  std::ostringstream os;
  os.precision(17);
  const auto& pts = std::get<contour::Sampled>(res.path.raw()).points;
  os << "s,z.re,z.im\n";
  for (std::size_t i = 0; i < pts.size(); ++i)
    os << res.arc[i] << ',' << pts[i].real() << ',' << pts[i].imag() << '\n';
  return os.str();
}

inline std::string csv(const asym::PicardSolution& sol) {
  std::ostringstream os;
  os.precision(17);
  os << "x,u.re,u.im,v.re,v.im\n";
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i)
    os << sol.x_grid[i] << ',' << sol.u_values[i].real() << ',' << sol.u_values[i].imag()
       << ',' << sol.v_values[i].real() << ',' << sol.v_values[i].imag() << '\n';
  return os.str();
}

}  // namespace bltk::io
