#pragma once

// Command-line front end. Subcommands emit machine-readable JSON on
// stdout and a short human summary on stderr; --out writes CSV plot data.
// Exit codes: 0 success/pass, 1 verification fail, 2 usage error,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bltk/config.hpp"
#include "bltk/io.hpp"

namespace bltk::cli {

using nlohmann::json;
using io::cjson;
using io::to_json;

// Complex CLI values go through the expression parser, so "1+2i", "pi/3"
// and "exp(1)" all work; the value must not depend on z.
inline Cplx parse_complex(const std::string& s) {
  Expr e = parse(s);
  if (depends_on_z(e.get())) throw ParseError("expected a constant, got a function of z", 0);
  return eval_jet(e, 0.0, 0).value();
}

namespace detail {

inline std::vector<Cplx> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open points file '" + path + "'");
  std::vector<Cplx> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double re = 0, im = 0;
    if (ss >> re) {
      ss >> im;
      pts.push_back({re, im});
    }
  }
  if (pts.empty()) throw PreconditionError("points file is empty");
  return pts;
}

// "x0:x1:nx,y0:y1:ny" -> rectangular grid of evaluation points
inline std::vector<Cplx> parse_grid(const std::string& spec) {
  auto comma = spec.find(',');
  if (comma == std::string::npos) throw ParseError("grid spec needs 'x0:x1:nx,y0:y1:ny'", 0);
  auto axis = [](const std::string& s) {
    double a, b;
    int n;
    char c1, c2;
    std::istringstream ss(s);
    if (!(ss >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
      throw ParseError("bad grid axis '" + s + "'", 0);
    return std::tuple(a, b, n);
  };
  auto [x0, x1, nx] = axis(spec.substr(0, comma));
  auto [y0, y1, ny] = axis(spec.substr(comma + 1));
  std::vector<Cplx> pts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      pts.push_back({nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1.0),
                     ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1.0)});
  return pts;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot open output file '" + path + "'");
  out << text;
}

inline std::string csv_points(const std::vector<Cplx>& zs, const std::vector<Cplx>& vals,
                              const std::string& name) {
  std::ostringstream os;
  os.precision(17);
  os << "z.re,z.im," << name << ".re," << name << ".im\n";
  for (std::size_t i = 0; i < zs.size(); ++i)
    os << zs[i].real() << ',' << zs[i].imag() << ',' << vals[i].real() << ','
       << vals[i].imag() << '\n';
  return os.str();
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"numerics for y'' + A(z) y = 0: products of solutions, decay paths, "
               "value-distribution functionals"};
  app.require_subcommand(1);
  app.fallthrough();  // --out/--config/--jobs may follow the subcommand

  std::string config_path, out_path;
  unsigned jobs = 0;
  bool have_jobs = false;
  app.add_option("--config", config_path, "config file (key = value lines)");
  app.add_option("--out", out_path, "write CSV plot data to this file");
  app.add_option("--jobs", jobs, "max worker threads")->each([&](const std::string&) {
    have_jobs = true;
  });

  // check-bl
  auto* cb = app.add_subcommand("check-bl", "verify E' = +-1 at every zero of E in a disc");
  std::string cb_expr, cb_center = "0";
  double cb_radius = 1.0, cb_tol = 1e-8;
  cb->add_option("--expr", cb_expr, "expression for E(z)")->required();
  cb->add_option("--center", cb_center, "disc centre");
  cb->add_option("--radius", cb_radius, "disc radius")->required();
  cb->add_option("--tol", cb_tol, "sign tolerance");

  // extract-a
  auto* ea = app.add_subcommand("extract-a", "coefficient A from a product E");
  std::string ea_expr, ea_points, ea_grid, ea_at;
  ea->add_option("--expr", ea_expr, "expression for E(z)")->required();
  ea->add_option("--points", ea_points, "CSV file of evaluation points (re,im)");
  ea->add_option("--grid", ea_grid, "grid spec x0:x1:nx,y0:y1:ny");
  ea->add_option("--at", ea_at, "single point (complex constant)");

  // schwarzian
  auto* sw = app.add_subcommand("schwarzian", "Schwarzian derivative of U");
  std::string sw_expr, sw_points, sw_grid, sw_at;
  sw->add_option("--expr", sw_expr, "expression for U(z)")->required();
  sw->add_option("--points", sw_points, "CSV file of evaluation points (re,im)");
  sw->add_option("--grid", sw_grid, "grid spec x0:x1:nx,y0:y1:ny");
  sw->add_option("--at", sw_at, "single point (complex constant)");

  // trace
  auto* tr = app.add_subcommand("trace", "trace a decay path dz/ds = eta/sqrt(A)");
  std::string tr_coeff, tr_start = "1";
  double tr_length = 10.0, tr_tol = 1e-10;
  tr->add_option("--coeff", tr_coeff, "expression for A(z)")->required();
  tr->add_option("--start", tr_start, "start point");
  tr->add_option("--length", tr_length, "arc length in the flow parameter")->required();
  tr->add_option("--tol", tr_tol, "trace tolerance");

  // decay
  auto* dc = app.add_subcommand("decay", "integrate a solution basis and fit the envelope");
  std::string dc_coeff, dc_path, dc_start = "1";
  double dc_length = 0.0, dc_tol = 1e-8;
  int dc_nic = 3;
  dc->add_option("--coeff", dc_coeff, "expression for A(z)")->required();
  dc->add_option("--path", dc_path, "CSV file of path points (re,im)");
  dc->add_option("--start", dc_start, "trace start (when no --path)");
  dc->add_option("--length", dc_length, "trace arc length (when no --path)");
  dc->add_option("--n-ic", dc_nic, "number of extra random initial conditions");
  dc->add_option("--tol", dc_tol, "ODE tolerance");

  // nevan
  auto* nv = app.add_subcommand("nevan", "Nevanlinna profile: m, N, T, order, lambda, delta");
  std::string nv_expr, nv_ode, nv_target = "0";
  double nv_rmax = 0.0;
  nv->add_option("--expr", nv_expr, "closed-form entire function");
  nv->add_option("--ode-coeff", nv_ode, "coefficient A; profiles E = f1 f2 built by integration");
  nv->add_option("--target", nv_target, "target value a (complex constant or 'inf')");
  nv->add_option("--rmax", nv_rmax, "largest radius");

  // picard
  auto* pc = app.add_subcommand("picard", "ray solution by contraction iteration");
  std::string pc_coeff;
  double pc_theta = 0.0, pc_xmin = 1.0, pc_xmax = 10.0, pc_xstep = 0.5, pc_tol = 1e-12;
  pc->add_option("--coeff", pc_coeff, "expression for A(z)")->required();
  pc->add_option("--theta", pc_theta, "ray direction (radians)");
  pc->add_option("--xmin", pc_xmin, "grid start X")->required();
  pc->add_option("--xmax", pc_xmax, "grid end")->required();
  pc->add_option("--xstep", pc_xstep, "output grid spacing");
  pc->add_option("--tol", pc_tol, "sup-norm stopping tolerance");

  // tail
  auto* tl = app.add_subcommand("tail", "int_X^cutoff r |A(r e^{i theta})| dr");
  std::string tl_coeff;
  double tl_theta = 0.0, tl_from = 1.0, tl_to = 10.0;
  tl->add_option("--coeff", tl_coeff, "expression for A(z)")->required();
  tl->add_option("--theta", tl_theta, "ray direction (radians)");
  tl->add_option("--from", tl_from, "lower limit X")->required();
  tl->add_option("--to", tl_to, "upper limit")->required();

  // gallery
  auto* ga = app.add_subcommand("gallery", "registered example functions");
  auto* ga_list = ga->add_subcommand("list", "list entries");
  auto* ga_verify = ga->add_subcommand("verify", "run an entry's assertions");
  std::string ga_name;
  ga_verify->add_option("name", ga_name, "entry name (omit to verify all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int exit_code = 0;
  try {
    Config cfg = Config::from_environment();
    if (!config_path.empty()) cfg.load_file(config_path);
    if (have_jobs) cfg.jobs = jobs;

    json out;
    std::string csv;

    if (*cb) {
      auto rep = banklaine::verify_bank_laine(parse(cb_expr), parse_complex(cb_center),
                                              cb_radius, cb_tol, cfg);
      out = to_json(rep);
      if (!rep.is_bank_laine) exit_code = 1;
      std::cerr << "zeros: " << rep.zeros.size() << "  bank-laine: "
                << (rep.is_bank_laine ? "yes" : "no")
                << "  special: " << (rep.is_special ? "yes" : "no");
      if (!rep.failure.empty()) std::cerr << "  (" << rep.failure << ")";
      std::cerr << "\n";
    } else if (*ea || *sw) {
      const bool extracting = static_cast<bool>(*ea);
      const std::string expr_s = extracting ? ea_expr : sw_expr;
      const std::string pts_s = extracting ? ea_points : sw_points;
      const std::string grid_s = extracting ? ea_grid : sw_grid;
      const std::string at_s = extracting ? ea_at : sw_at;
      JetFn f(parse(expr_s));
      std::vector<Cplx> pts;
      if (!pts_s.empty()) pts = detail::read_points_file(pts_s);
      else if (!grid_s.empty()) pts = detail::parse_grid(grid_s);
      else if (!at_s.empty()) pts.push_back(parse_complex(at_s));
      else throw PreconditionError("need --points, --grid or --at");
      std::vector<Cplx> vals;
      json list = json::array();
      for (Cplx z : pts) {
        Cplx v = extracting ? banklaine::coefficient_from_product(f.jet(z, 2))
                            : banklaine::schwarzian(f.jet(z, 3));
        vals.push_back(v);
        list.push_back({{"z", cjson(z)}, {"value", cjson(v)}});
      }
      out = json{{"op", extracting ? "extract-a" : "schwarzian"}, {"values", list}};
      csv = detail::csv_points(pts, vals, extracting ? "A" : "S");
      std::cerr << pts.size() << " points evaluated\n";
    } else if (*tr) {
      auto res = asym::trace_decay_path(JetFn(parse(tr_coeff)), parse_complex(tr_start),
                                        tr_length, tr_tol, cfg);
      auto& pts = std::get<contour::Sampled>(res.path.raw()).points;
      out = json{{"op", "trace"},
                 {"eta", res.eta},
                 {"points", pts.size()},
                 {"start", cjson(pts.front())},
                 {"end", cjson(pts.back())},
                 {"truncated", res.truncated}};
      csv = io::csv(res);
      std::cerr << "traced " << pts.size() << " samples to " << pts.back() << "\n";
      if (res.truncated) {
        std::cerr << "trace stopped early near a zero of A\n";
        exit_code = 3;
      }
    } else if (*dc) {
      JetFn A(parse(dc_coeff));
      std::unique_ptr<contour::PathSpec> path;
      if (!dc_path.empty()) {
        path = std::make_unique<contour::PathSpec>(
            contour::Sampled{detail::read_points_file(dc_path)});
      } else {
        if (dc_length <= 0) throw PreconditionError("need --path or --start/--length");
        auto res =
            asym::trace_decay_path(A, parse_complex(dc_start), dc_length, 1e-10, cfg);
        path = std::make_unique<contour::PathSpec>(res.path);
      }
      auto rep = asym::verify_decay(A, *path, dc_nic, dc_tol, cfg);
      out = to_json(rep);
      csv = io::csv(rep);
      if (!rep.verdict) exit_code = 1;
      std::cerr << "model " << (rep.model == asym::DecayModel::PowerLaw ? "power" : "exp")
                << ", rate " << rep.fitted_rate << ", verdict "
                << (rep.verdict ? "decay" : "no-decay") << "\n";
    } else if (*nv) {
      if (nv_rmax > 0) cfg.rmax = nv_rmax;
      auto radii = nevan::default_radii(cfg);
      nevan::NevanProfile prof;
      if (!nv_ode.empty()) {
        prof = nevan::profile_ode(JetFn(parse(nv_ode)), radii, cfg);
      } else if (!nv_expr.empty()) {
        nevan::Target target = nevan::Target::infinity();
        if (nv_target != "inf") target = nevan::Target::at(parse_complex(nv_target));
        prof = nevan::profile(nevan::FunctionHandle::entire(parse(nv_expr)), target, radii, cfg);
      } else {
        throw PreconditionError("need --expr or --ode-coeff");
      }
      out = to_json(prof);
      csv = io::csv(prof);
      std::cerr << "order " << prof.fitted_order << ", lambda " << prof.fitted_lambda
                << ", delta " << prof.delta_estimate << "\n";
    } else if (*pc) {
      std::vector<double> grid;
      for (double x = pc_xmin; x <= pc_xmax + 1e-12; x += pc_xstep) grid.push_back(x);
      auto sol = asym::picard_ray_solution(JetFn(parse(pc_coeff)), pc_theta, pc_xmin, grid,
                                           pc_tol, cfg);
      out = to_json(sol);
      csv = io::csv(sol);
      std::cerr << "converged in " << sol.iterations << " iterations, residual "
                << sol.residual << "\n";
    } else if (*tl) {
      auto res = asym::tail_integral(JetFn(parse(tl_coeff)), tl_theta, tl_from, tl_to, 1e-9);
      out = json{{"op", "tail"}, {"value", res.value}, {"last_panel", res.last_panel}};
      std::cerr << "tail integral " << res.value << "\n";
    } else if (*ga) {
      if (*ga_list || (!*ga_verify)) {
        json list = json::array();
        for (const auto& e : gallery::entries())
          list.push_back({{"name", e.name}, {"summary", e.summary}});
        out = json{{"entries", list}};
        std::cerr << gallery::entries().size() << " entries\n";
      } else {
        json reports = json::array();
        bool all_pass = true;
        std::vector<std::string> names =
            ga_name.empty() ? gallery::names() : std::vector<std::string>{ga_name};
        for (const auto& n : names) {
          auto rep = gallery::verify_example(n, cfg);
          all_pass = all_pass && rep.pass;
          reports.push_back(to_json(rep));
          std::cerr << n << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
        }
        out = names.size() == 1 ? reports[0] : json{{"reports", reports}};
        if (!all_pass) exit_code = 1;
      }
    }

    std::cout << out.dump(2) << "\n";
    if (!out_path.empty() && !csv.empty()) detail::write_file(out_path, csv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "numerical domain error: " << e.what() << "\n";
    return 3;
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}

}  // namespace bltk::cli
