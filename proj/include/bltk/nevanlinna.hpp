#pragma once

// Numerical Nevanlinna functionals: proximity m(r, f, a), characteristic
// T(r, f), deficiency, order of growth and exponent of convergence, for
// closed-form functions and for products E = f1 f2 of ODE solutions that
// are only accessible by integrating y'' + A y = 0 out from the origin.
//
// Everything here is a finite-range estimate: liminf/limsup are replaced
// by min / least-squares slope over the top part of a finite radii grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "bltk/config.hpp"
#include "bltk/ode.hpp"
#include "bltk/sum.hpp"
#include "bltk/zeros.hpp"

namespace bltk::nevan {

// Geometric radii grid with the configured ratio, ending exactly at rmax.
inline std::vector<double> default_radii(const Config& cfg, double rmax = 0.0) {
  if (rmax <= 0) rmax = cfg.rmax;
  std::vector<double> out{1.0};
  while (out.back() * cfg.radii_ratio <= rmax * (1 + 1e-12))
    out.push_back(out.back() * cfg.radii_ratio);
  if (out.back() < rmax * (1 - 1e-9)) out.push_back(rmax);
  return out;
}

// Evaluator of f on one circle. `log_abs` must stay finite-safe even when
// the plain value would overflow; it defaults to log|value|.
struct CircleFn {
  std::function<Cplx(double)> value;
  std::function<double(double)> log_abs;

  double logmag(double theta) const {
    if (log_abs) return log_abs(theta);
    return std::log(std::abs(value(theta)));
  }
};

struct Target {
  bool is_inf = false;
  Cplx a{};
  static Target infinity() { return {true, {}}; }
  static Target at(Cplx a) { return {false, a}; }
};

// (1/2 pi) \int_0^{2 pi} log+ |g| with g = f (a = inf) or 1/(f - a).
// Composite GK panels refine adaptively; integrable log spikes near
// zeros of f - a are capped once panels reach the configured floor.
inline double proximity(const CircleFn& f, double r, Target a, int nodes,
                        const Config& cfg = {}) {
  if (r < 1.0) throw PreconditionError("proximity needs r >= 1");
  if (nodes < 64) throw PreconditionError("proximity needs at least 64 nodes");
  const double pi = 3.141592653589793238462643383279502884;
  const double cap = cfg.logplus_cap;

  auto integrand = [&](double theta) -> double {
    double g;
    if (a.is_inf) {
      g = f.logmag(theta);
    } else if (a.a == Cplx{}) {
      g = -f.logmag(theta);
    } else {
      Cplx v = f.value(theta) - a.a;
      g = -std::log(std::abs(v));
    }
    return g > 0.0 ? g : 0.0;
  };

  struct Panel {
    double a, b, val, err;
  };
  // Once a panel is at the width floor, the (integrable) log spike of
  // log+ 1/|f - a| near a zero of f - a is capped; the cap bounds the
  // bias of the unresolved sliver. Wide panels are never capped - large
  // smooth values there are genuine growth, not spikes.
  auto eval_panel = [&](double lo, double hi) {
    Panel p{lo, hi, 0, 0};
    const double hw = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
    const bool at_floor = (hi - lo) <= 1.0001e-3;
    double k = 0, g7 = 0;
    for (int i = 0; i < 15; ++i) {
      double v = integrand(mid + hw * contour::gk::xk[i]);
      if (at_floor && v > cap) v = cap;
      k += contour::gk::wk[i] * v;
      if (i % 2 == 1) g7 += contour::gk::wg[i / 2] * v;
    }
    p.val = hw * k;
    p.err = std::fabs(hw * (k - g7));
    if (!std::isfinite(p.val) || !std::isfinite(p.err)) {
      // a node hit an exact zero; keep the panel bounded and force a split
      p.val = hw * 2.0 * cap;
      p.err = 1e300;
    }
    return p;
  };

  std::vector<Panel> panels;
  const int base = std::max(64, nodes);
  for (int i = 0; i < base; ++i)
    panels.push_back(eval_panel(2 * pi * i / base, 2 * pi * (i + 1) / base));

  auto total = [&] {
    CompensatedSum v, e;
    for (const auto& p : panels) {
      v += p.val;
      e += p.err;
    }
    return std::pair(v.value(), e.value());
  };

  for (int round = 0; round < 64; ++round) {
    auto [val, err] = total();
    double target = cfg.proximity_rel_err * (1.0 + std::fabs(val) / (2 * pi));
    if (err / (2 * pi) <= target || panels.size() > 40000) break;
    // split every panel that carries more than its share of the budget
    std::vector<Panel> next;
    next.reserve(panels.size() * 2);
    bool any = false;
    for (const auto& p : panels) {
      double width = p.b - p.a;
      if (p.err > target * width && width > 1e-3) {
        double m = 0.5 * (p.a + p.b);
        next.push_back(eval_panel(p.a, m));
        next.push_back(eval_panel(m, p.b));
        any = true;
      } else {
        next.push_back(p);
      }
    }
    panels.swap(next);
    if (!any) break;
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum v;
  for (const auto& p : panels) v += p.val;
  return v.value() / (2 * pi);
}

// A function handle with enough structure to compute T(r): entire, or an
// explicit quotient whose poles are the denominator's zeros.
struct FunctionHandle {
  JetFn f;
  std::optional<Expr> f_expr;       // when available: zero counting route
  std::optional<Expr> denom_expr;   // poles of f = zeros of denom
  static FunctionHandle entire(const Expr& e) { return {JetFn(e), e, std::nullopt}; }
  static FunctionHandle quotient(const Expr& num_over_denom, const Expr& denom) {
    return {JetFn(num_over_denom), num_over_denom, denom};
  }

  CircleFn on_circle(double r) const {
    return CircleFn{[this, r](double th) { return f(std::polar(r, th)); }, {}};
  }
};

// T(r, f) = m(r, f, inf) + N(r, poles).
inline double characteristic(const FunctionHandle& f, double r, const Config& cfg = {}) {
  double m = proximity(f.on_circle(r), r, Target::infinity(), cfg.proximity_panels, cfg);
  double N = 0.0;
  if (f.denom_expr) {
    auto cd = zeros::counting_function(*f.denom_expr, {std::max(1.0, r)}, cfg);
    N = cd.N_values.back();
  }
  return m + N;
}

struct DeficiencyEstimate {
  double value = 0.0;   // min of m/T over the top half of the radii
  double trend = 0.0;   // (m/T) at the largest radius minus at the smallest
  std::vector<double> ratios;
};

// Finite-range stand-in for liminf m(r,1/(f-a))/T(r,f).
inline DeficiencyEstimate deficiency_estimate(const FunctionHandle& f, Cplx a,
                                              const std::vector<double>& radii,
                                              const Config& cfg = {}) {
  if (radii.size() < 3) throw PreconditionError("deficiency estimate needs >= 3 radii");
  if (!(radii.back() >= 4.0 * radii.front()))
    throw PreconditionError("radii must span at least a factor-4 range");
  DeficiencyEstimate out;
  for (double r : radii) {
    double m = proximity(f.on_circle(r), r, Target::at(a), cfg.proximity_panels, cfg);
    double T = characteristic(f, r, cfg);
    if (T < 1.0) throw PreconditionError("T(r) < 1: function too small for estimation");
    out.ratios.push_back(m / T);
  }
  std::size_t start = radii.size() / 2;
  double mn = out.ratios[start];
  for (std::size_t i = start; i < out.ratios.size(); ++i) mn = std::min(mn, out.ratios[i]);
  out.value = mn;
  out.trend = out.ratios.back() - out.ratios.front();
  return out;
}

namespace detail {

inline double top_decade_slope(const std::vector<double>& radii,
                               const std::vector<double>& vals, bool log_r_floor) {
  std::vector<double> x, y;
  double lo = radii.back() / 10.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < lo) continue;
    if (!(vals[i] > 0.0)) {
      if (log_r_floor) continue;
      throw PreconditionError("nonpositive values in growth fit");
    }
    x.push_back(std::log(radii[i]));
    y.push_back(std::log(vals[i]));
  }
  if (x.size() < 2) throw PreconditionError("not enough points in the top decade");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace detail

// Least-squares slope of log T against log r over the top decade.
inline double order_estimate(const FunctionHandle& f, const std::vector<double>& radii,
                             const Config& cfg = {}) {
  if (radii.size() < 5) throw PreconditionError("order estimate needs >= 5 radii");
  std::vector<double> T;
  for (double r : radii) T.push_back(characteristic(f, r, cfg));
  return detail::top_decade_slope(radii, T, false);
}

struct ConvergenceExponent {
  double value = 0.0;
  bool zero_free = false;
};

inline ConvergenceExponent convergence_exponent(const zeros::CountingData& counting) {
  ConvergenceExponent out;
  if (counting.zero_free) {
    out.zero_free = true;
    return out;
  }
  out.value = detail::top_decade_slope(counting.radii, counting.N_values, true);
  return out;
}

// ---- ODE-defined product E = f1 f2 ----
//
// The only access to E is integrating y'' + A y = 0. States are advanced
// radially from the origin and checkpointed per ray, so circles at
// several radii share the integration work along common angles.

class OdeProduct {
 public:
  OdeProduct(JetFn A, const Config& cfg) : A_(std::move(A)), cfg_(cfg) {}

  // (f1, f1', f2, f2') at r e^{i theta}; f1(0)=1, f1'(0)=0, f2(0)=0, f2'(0)=1.
  std::array<Cplx, 4> state(double r, double theta) const {
    if (r == 0.0) return {1.0, 0.0, 0.0, 1.0};
    std::array<Cplx, 4> y{1.0, 0.0, 0.0, 1.0};
    double r_from = 0.0;
    double drift_base = 0.0;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto& ray = cache_[theta];
      auto it = std::upper_bound(
          ray.begin(), ray.end(), r,
          [](double rv, const Checkpoint& ck) { return rv < ck.r; });
      if (it != ray.begin()) {
        --it;
        if (it->r == r) return it->state;
        r_from = it->r;
        y = it->state;
        drift_base = it->drift;
      }
    }

    contour::detail::StateMat s{y[0], y[1], y[2], y[3]};
    auto coeff = [this](Cplx z, Cplx* c) { c[0] = A_.jet(z, 0).value(); };
    contour::OdeOptions opt;
    opt.method = contour::OdeMethod::Magnus4;
    contour::detail::StepSink sink{};
    double wd = drift_base +
                contour::integrate_linear_system(
                    coeff, 2, contour::PathSpec(contour::RaySegment{theta, r_from, r}), s, 2,
                    cfg_.ode_tol, opt, sink);
    std::array<Cplx, 4> out{s[0], s[1], s[2], s[3]};
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto& ray = cache_[theta];
      auto it = std::lower_bound(
          ray.begin(), ray.end(), r,
          [](const Checkpoint& ck, double rv) { return ck.r < rv; });
      if (it == ray.end() || it->r != r) ray.insert(it, {r, out, wd});
      wdrift_ = std::max(wdrift_, wd);
    }
    return out;
  }

  Cplx E(double r, double theta) const {
    auto s = state(r, theta);
    return s[0] * s[2];
  }

  double log_abs_E(double r, double theta) const {
    auto s = state(r, theta);
    return std::log(std::abs(s[0])) + std::log(std::abs(s[2]));
  }

  CircleFn on_circle(double r) const {
    return CircleFn{[this, r](double th) { return E(r, th); },
                    [this, r](double th) { return log_abs_E(r, th); }};
  }

  double wronskian_drift() const {
    std::lock_guard<std::mutex> lk(mu_);
    return wdrift_;
  }

  // Zeros of E inside |z| < r by continuous-argument winding of f1 and f2
  // separately around the circle. Throws ZeroOnCurve if a zero sits on
  // the circle beyond refinement resolution.
  int count_zeros_circle(double r, unsigned jobs = 1) const {
    struct NodeVal {
      double theta;
      double ph1, ph2;  // principal args of f1, f2
      double ld1, ld2;  // |f'/f|: local rotation-rate bounds
    };
    const double pi = 3.141592653589793238462643383279502884;
    auto probe = [&](double th) {
      auto s = state(r, th);
      auto rate = [](Cplx v, Cplx d) {
        double m = std::abs(v);
        return m > 0 ? std::abs(d) / m : 1e300;
      };
      return NodeVal{th, std::arg(s[0]), std::arg(s[2]), rate(s[0], s[1]), rate(s[2], s[3])};
    };
    int base = 512;
    std::vector<NodeVal> nodes(base + 1);
    parallel_for(base + 1, jobs, [&](std::size_t i) {
      nodes[i] = probe(2 * pi * static_cast<double>(i) / base);
    });
    nodes.back() = nodes.front();  // same geometric point
    nodes.back().theta = 2 * pi;

    struct Gap {
      NodeVal a, b;
      int depth;
    };
    // wrapped increments cannot see whole turns, so gaps refine until the
    // rotation-rate bound |f'/f| * arc length is small at all 3 samples
    auto seg_ok = [r](const NodeVal& a, const NodeVal& m, const NodeVal& b) {
      double len = r * (b.theta - a.theta);
      double r1 = std::max({a.ld1, m.ld1, b.ld1});
      double r2 = std::max({a.ld2, m.ld2, b.ld2});
      if (!(r1 * len <= 0.8) || !(r2 * len <= 0.8)) return false;
      return std::fabs(zeros::detail::wrap_pi(m.ph1 - a.ph1)) <= 1.0 &&
             std::fabs(zeros::detail::wrap_pi(b.ph1 - m.ph1)) <= 1.0 &&
             std::fabs(zeros::detail::wrap_pi(m.ph2 - a.ph2)) <= 1.0 &&
             std::fabs(zeros::detail::wrap_pi(b.ph2 - m.ph2)) <= 1.0;
    };
    std::vector<Gap> work;
    for (int i = 0; i < base; ++i) work.push_back({nodes[i], nodes[i + 1], 0});
    std::vector<std::pair<double, std::pair<double, double>>> accepted;  // (theta, (d1,d2))
    while (!work.empty()) {
      std::vector<NodeVal> mids(work.size());
      parallel_for(work.size(), jobs, [&](std::size_t i) {
        mids[i] = probe(0.5 * (work[i].a.theta + work[i].b.theta));
      });
      std::vector<Gap> next;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const Gap& g = work[i];
        const NodeVal& m = mids[i];
        if (seg_ok(g.a, m, g.b)) {
          accepted.push_back({g.a.theta,
                              {zeros::detail::wrap_pi(m.ph1 - g.a.ph1) +
                                   zeros::detail::wrap_pi(g.b.ph1 - m.ph1),
                               zeros::detail::wrap_pi(m.ph2 - g.a.ph2) +
                                   zeros::detail::wrap_pi(g.b.ph2 - m.ph2)}});
          continue;
        }
        if (g.depth > 46) throw zeros::ZeroOnCurve(std::polar(r, m.theta));
        next.push_back({g.a, m, g.depth + 1});
        next.push_back({m, g.b, g.depth + 1});
      }
      work.swap(next);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    CompensatedSum w1, w2;
    for (const auto& a : accepted) {
      w1 += a.second.first;
      w2 += a.second.second;
    }
    double n1 = w1.value() / (2 * pi), n2 = w2.value() / (2 * pi);
    long r1 = std::lround(n1), r2 = std::lround(n2);
    if (std::fabs(n1 - r1) > 0.15 || std::fabs(n2 - r2) > 0.15)
      throw NumericsError("solution winding numbers did not settle to integers");
    return static_cast<int>(r1 + r2);
  }

  // n on a perturbed-if-needed circle.
  int count_zeros_robust(double r, unsigned jobs = 1) const {
    static constexpr double kPerturb[] = {1.0, 1.003, 0.997, 1.007, 0.993, 1.01};
    std::string last;
    for (double sc : kPerturb) {
      try {
        return count_zeros_circle(r * sc, jobs);
      } catch (const NumericsError& e) {
        last = e.what();
      }
    }
    throw NumericsError("circle zero count failed after perturbation: " + last);
  }

 private:
  struct Checkpoint {
    double r;
    std::array<Cplx, 4> state;
    double drift;  // accumulated Wronskian-ratio wander from the origin
  };
  JetFn A_;
  Config cfg_;
  mutable std::mutex mu_;
  mutable std::map<double, std::vector<Checkpoint>> cache_;
  mutable double wdrift_ = 0.0;
};

struct NevanProfile {
  std::vector<double> radii;
  std::vector<double> m_values;  // m(r, 1/(f - a)) (or m(r, f) for a = inf)
  std::vector<double> N_values;  // N(r, 1/(f - a))
  std::vector<double> T_values;  // T(r, f)
  Target target;
  double fitted_order = 0.0;
  double fitted_lambda = 0.0;
  bool lambda_zero_free = false;
  double delta_estimate = 0.0;
  double delta_trend = 0.0;
  double wronskian_drift = 0.0;  // ODE-built profiles only
  // finite-range estimate: min/slope over the top of the grid stands in
  // for liminf/limsup
};

// Profile for a closed-form entire function.
inline NevanProfile profile(const FunctionHandle& f, Target a,
                            const std::vector<double>& radii, const Config& cfg = {}) {
  NevanProfile p;
  p.radii = radii;
  p.target = a;
  for (double r : radii) {
    p.m_values.push_back(proximity(f.on_circle(r), r, a, cfg.proximity_panels, cfg));
    p.T_values.push_back(characteristic(f, r, cfg));
  }
  if (!a.is_inf && f.f_expr) {
    Expr shifted = *f.f_expr;
    if (a.a != Cplx{})
      shifted = shifted - Expr::literal(a.a.real()) -
                Expr::literal(a.a.imag()) * Expr::constant_i();
    auto cd = zeros::counting_function(shifted, radii, cfg);
    p.N_values = cd.N_values;
    auto ce = convergence_exponent(cd);
    p.fitted_lambda = ce.value;
    p.lambda_zero_free = ce.zero_free;
  } else {
    p.N_values.assign(radii.size(), 0.0);
    p.lambda_zero_free = true;
  }
  p.fitted_order = detail::top_decade_slope(radii, p.T_values, false);
  if (!a.is_inf) {
    std::size_t start = radii.size() / 2;
    double mn = 1e300;
    for (std::size_t i = start; i < radii.size(); ++i)
      mn = std::min(mn, p.m_values[i] / std::max(1e-12, p.T_values[i]));
    p.delta_estimate = mn;
    p.delta_trend = p.m_values.back() / p.T_values.back() -
                    p.m_values.front() / p.T_values.front();
  } else {
    p.delta_estimate = 1.0;
  }
  return p;
}

// Profile for the ODE product E = f1 f2 with target 0.
inline NevanProfile profile_ode(const JetFn& A, const std::vector<double>& radii,
                                const Config& cfg = {}) {
  OdeProduct ode(A, cfg);
  unsigned jobs = cfg.jobs;
  NevanProfile p;
  p.radii = radii;
  p.target = Target::at(0.0);

  // n(t) grid: the radii plus geometric midpoints, probed down to r0/32
  std::vector<double> grid;
  for (int k = 5; k >= 1; --k) grid.push_back(radii.front() / std::pow(2.0, k));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    grid.push_back(radii[i]);
    if (i + 1 < radii.size())
      grid.push_back(radii[i] * std::sqrt(radii[i + 1] / radii[i]));
  }
  std::sort(grid.begin(), grid.end());

  int n0 = ode.count_zeros_robust(1e-4, jobs);
  std::map<double, int> counts;
  for (double t : grid) counts[t] = ode.count_zeros_robust(t, jobs);

  CompensatedSum acc;
  double prev_t = grid.front();
  double prev_v = static_cast<double>(counts[prev_t] - n0) / prev_t;
  std::size_t gi = 1;
  zeros::CountingData cd;
  cd.radii = radii;
  cd.n0 = n0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    while (gi < grid.size() && grid[gi] <= radii[i] * (1 + 1e-15)) {
      double t = grid[gi];
      double v = static_cast<double>(counts[t] - n0) / t;
      acc += 0.5 * (v + prev_v) * (t - prev_t);
      prev_t = t;
      prev_v = v;
      ++gi;
    }
    int n = counts[radii[i]];
    cd.n_values.push_back(n);
    if (n > 0) cd.zero_free = false;
    cd.N_values.push_back(acc.value() + n0 * std::log(radii[i]));
  }
  p.N_values = cd.N_values;

  for (double r : radii) {
    // prewarm the ray cache in parallel at the base panel nodes
    const double pi = 3.141592653589793238462643383279502884;
    int base = cfg.proximity_panels;
    std::vector<double> thetas;
    for (int i = 0; i < base; ++i) {
      double lo = 2 * pi * i / base, hi = 2 * pi * (i + 1) / base;
      double hw = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
      for (int k = 0; k < 15; ++k) thetas.push_back(mid + hw * contour::gk::xk[k]);
    }
    parallel_for(thetas.size(), jobs, [&](std::size_t i) { ode.state(r, thetas[i]); });
    auto circ = ode.on_circle(r);
    p.T_values.push_back(proximity(circ, r, Target::infinity(), base, cfg));
    p.m_values.push_back(proximity(circ, r, Target::at(0.0), base, cfg));
  }

  p.fitted_order = detail::top_decade_slope(radii, p.T_values, false);
  auto ce = convergence_exponent(cd);
  p.fitted_lambda = ce.value;
  p.lambda_zero_free = ce.zero_free;
  std::size_t start = radii.size() / 2;
  double mn = 1e300;
  for (std::size_t i = start; i < radii.size(); ++i)
    mn = std::min(mn, p.m_values[i] / std::max(1e-12, p.T_values[i]));
  p.delta_estimate = mn;
  p.delta_trend =
      p.m_values.back() / p.T_values.back() - p.m_values.front() / p.T_values.front();
  p.wronskian_drift = ode.wronskian_drift();
  return p;
}

}  // namespace bltk::nevan
