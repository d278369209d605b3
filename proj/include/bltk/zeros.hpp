#pragma once

// Zeros of analytic functions in discs: argument-principle counting,
// quadrisection location with Newton refinement, and the integrated
// counting function N(r, 1/f).
//
// Functions are handled in multiplicatively decomposed form
//   f = coef * prod_k base_k^pow_k,
// with exp(...) factors kept symbolic. log f' / f, log|f| and continuous
// phases are then computable even where the plain product over/underflows
// (e.g. exp(2 pi i z^2) factors far from the real axis).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "bltk/config.hpp"
#include "bltk/expr.hpp"
#include "bltk/quadrature.hpp"
#include "bltk/sum.hpp"

namespace bltk::zeros {

struct ZeroRecord {
  Cplx location{};
  int multiplicity = 1;
  double residual = 0.0;  // |f| at the refined point
  bool clustered = false; // subdivision floor hit; location/multiplicity aggregate
};

struct CountingData {
  std::vector<double> radii;
  std::vector<int> n_values;
  int n0 = 0;  // multiplicity of a zero at the origin
  std::vector<double> N_values;
  bool zero_free = true;
};

struct Factor {
  JetFn base;
  JetFn exp_arg;  // set iff is_exp: base == exp(exp_arg)
  bool is_exp = false;
  long power = 1;
};

class AnalyticFn {
 public:
  static AnalyticFn from_expr(const Expr& e) {
    AnalyticFn f;
    f.decompose(e, 1);
    if (f.factors_.empty())
      f.factors_.push_back({JetFn(e), {}, false, 1});  // constant functions stay usable
    return f;
  }
  static AnalyticFn wrap(JetFn fn) {
    AnalyticFn f;
    f.factors_.push_back({std::move(fn), {}, false, 1});
    return f;
  }

  Jet jet(Cplx z, int order) const {
    Jet acc = Jet::constant(coef_, order);
    for (const auto& fac : factors_)
      acc = acc * jet_pow_int(fac.base.jet(z, order), fac.power);
    return acc;
  }

  // f'/f; robust against factor overflow as long as each base is tame.
  Cplx log_deriv(Cplx z) const {
    Cplx acc{};
    for (const auto& fac : factors_) {
      if (fac.is_exp) {
        acc += static_cast<double>(fac.power) * fac.exp_arg.jet(z, 1).d1();
      } else {
        Jet b = fac.base.jet(z, 1);
        if (std::abs(b.value()) == 0.0) throw DomainError("log-derivative at a zero", z);
        acc += static_cast<double>(fac.power) * (b.d1() / b.value());
      }
    }
    return acc;
  }

  double log_abs(Cplx z) const {
    double acc = std::log(std::abs(coef_));
    for (const auto& fac : factors_) {
      if (fac.is_exp)
        acc += fac.power * fac.exp_arg.jet(z, 0).value().real();
      else
        acc += fac.power * std::log(std::abs(fac.base.jet(z, 0).value()));
    }
    return acc;
  }

  struct Sample {
    double phase;   // phase of the un-powered base (exact for exp factors)
    double logmag;  // log|base|
    double ld_abs;  // |base'/base|, the local rotation rate bound
    bool exact;
  };

  void sample(Cplx z, std::vector<Sample>& out) const {
    out.clear();
    for (const auto& fac : factors_) {
      if (fac.is_exp) {
        Cplx a = fac.exp_arg.jet(z, 0).value();
        out.push_back({a.imag(), a.real(), 0.0, true});
      } else {
        Jet v = fac.base.jet(z, 1);
        double mag = std::abs(v.value());
        out.push_back({std::arg(v.value()), std::log(mag),
                       mag > 0 ? std::abs(v.d1()) / mag : 1e300, false});
      }
    }
  }

  long power_of(std::size_t i) const { return factors_[i].power; }
  std::size_t factor_count() const { return factors_.size(); }

 private:
  void decompose(const Expr& e, long pow) {
    const ExprNode* n = e.get();
    if (!depends_on_z(n)) {
      Cplx c = eval_jet(e, 0.0, 0).value();
      fold_const(c, pow);
      return;
    }
    switch (n->kind) {
      case NodeKind::Mul:
        decompose(Expr(subtree(n, 0)), pow);
        decompose(Expr(subtree(n, 1)), pow);
        return;
      case NodeKind::Div:
        decompose(Expr(subtree(n, 0)), pow);
        decompose(Expr(subtree(n, 1)), -pow);
        return;
      case NodeKind::Neg:
        if (pow % 2 != 0) coef_ = -coef_;
        decompose(Expr(subtree(n, 0)), pow);
        return;
      case NodeKind::Pow: {
        Expr b(subtree(n, 0)), ex(subtree(n, 1));
        if (!depends_on_z(ex.get())) {
          Cplx c = eval_jet(ex, 0.0, 0).value();
          double rn = std::round(c.real());
          if (c.imag() == 0.0 && c.real() == rn && std::fabs(rn) * std::abs(pow) <= 64)
            return decompose(b, pow * static_cast<long>(rn));
        }
        break;
      }
      case NodeKind::Call:
        if (n->fn == Builtin::Exp) {
          Expr arg(subtree(n, 0));
          factors_.push_back({JetFn(e), JetFn(arg), true, pow});
          return;
        }
        break;
      default:
        break;
    }
    factors_.push_back({JetFn(e), {}, false, pow});
  }

  void fold_const(Cplx c, long pow) {
    if (pow >= 0)
      for (long k = 0; k < pow; ++k) coef_ *= c;
    else
      for (long k = 0; k < -pow; ++k) coef_ /= c;
  }

  static std::shared_ptr<const ExprNode> subtree(const ExprNode* n, int which) {
    return which == 0 ? n->a : n->b;
  }

  Cplx coef_{1.0};
  std::vector<Factor> factors_;
};

// Persistent jump in the argument that refinement cannot resolve: there
// is (numerically) a zero on the curve.
struct ZeroOnCurve : NumericsError {
  Cplx where;
  explicit ZeroOnCurve(Cplx z)
      : NumericsError("zero of f on the integration curve"), where(z) {}
};

namespace detail {

inline double wrap_pi(double a) {
  const double pi = 3.141592653589793238462643383279502884;
  while (a > pi) a -= 2 * pi;
  while (a < -pi) a += 2 * pi;
  return a;
}

// Continuous phase increment of f along curve(t), t in [t0, t1].
//
// Wrapped phase differences alone cannot see whole turns between samples,
// so segments refine until the local rotation-rate bound |g'/g| times the
// segment length is small for every plain factor (checked at both ends
// and the midpoint). A zero approaching the curve drives |g'/g| up at the
// nearest sample, forcing refinement toward it until the depth cap trips.
template <class Curve>
double phase_delta(const AnalyticFn& f, Curve&& curve, double t0, double t1) {
  using Samples = std::vector<AnalyticFn::Sample>;
  auto seg_ok = [&f](const Samples& a, const Samples& m, const Samples& b, double len) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].exact) continue;
      double rate = std::max({a[i].ld_abs, m[i].ld_abs, b[i].ld_abs});
      if (!(rate * len <= 0.8)) return false;
      if (std::fabs(wrap_pi(m[i].phase - a[i].phase)) > 1.0 ||
          std::fabs(wrap_pi(b[i].phase - m[i].phase)) > 1.0)
        return false;
      if (!std::isfinite(a[i].logmag) || !std::isfinite(m[i].logmag) ||
          !std::isfinite(b[i].logmag))
        return false;
    }
    return true;
  };
  auto accumulate = [&f](const Samples& a, const Samples& b, CompensatedSum& total) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = a[i].exact ? (b[i].phase - a[i].phase) : wrap_pi(b[i].phase - a[i].phase);
      total += static_cast<double>(f.power_of(i)) * d;
    }
  };

  struct Frame {
    double t0, t1;
    Samples s0, s1;
    int depth;
  };
  Samples first, last;
  Cplx zfirst = curve(t0), zlast = curve(t1);
  f.sample(zfirst, first);
  f.sample(zlast, last);
  std::vector<Frame> stack;
  stack.push_back({t0, t1, std::move(first), std::move(last), 0});
  CompensatedSum total;
  std::size_t evals = 0;
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    double tm = 0.5 * (fr.t0 + fr.t1);
    Cplx za = curve(fr.t0), zm = curve(tm), zb = curve(fr.t1);
    // chord sum bounds the arc well once frames are short
    double len = 1.1 * (std::abs(zm - za) + std::abs(zb - zm));
    Samples sm;
    f.sample(zm, sm);
    if (++evals > 4000000) throw ZeroOnCurve(zm);
    if (seg_ok(fr.s0, sm, fr.s1, len)) {
      accumulate(fr.s0, sm, total);
      accumulate(sm, fr.s1, total);
      continue;
    }
    if (fr.depth > 52) throw ZeroOnCurve(zm);
    stack.push_back({tm, fr.t1, sm, std::move(fr.s1), fr.depth + 1});
    stack.push_back({fr.t0, tm, std::move(fr.s0), std::move(sm), fr.depth + 1});
  }
  return total.value();
}

struct Box {
  double x0, x1, y0, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double diag() const { return std::hypot(width(), height()); }
};

inline int count_in_box(const AnalyticFn& f, const Box& b) {
  const double pi2 = 2 * 3.141592653589793238462643383279502884;
  Cplx c00{b.x0, b.y0}, c10{b.x1, b.y0}, c11{b.x1, b.y1}, c01{b.x0, b.y1};
  double w = 0;
  auto edge = [&](Cplx a, Cplx bb) {
    w += phase_delta(f, [&](double t) { return a + t * (bb - a); }, 0.0, 1.0);
  };
  edge(c00, c10);
  edge(c10, c11);
  edge(c11, c01);
  edge(c01, c00);
  double n = w / pi2;
  long r = std::lround(n);
  if (std::fabs(n - r) > 0.25)
    throw NumericsError("non-integer winding number over box boundary");
  return static_cast<int>(r);
}

}  // namespace detail

// (1/2 pi i) \oint f'/f over the disc boundary, rounded to an integer.
// A zero sitting (numerically) on the circle is dodged by the fixed
// perturbation sequence; past that the count is an error.
inline int count_zeros_disc(const AnalyticFn& f, Cplx center, double radius, double tol,
                            const Config& cfg = {}) {
  static constexpr double kPerturb[] = {1.0, 1.003, 0.997, 1.007, 0.993, 1.01};
  const double pi2 = 2 * 3.141592653589793238462643383279502884;
  const Cplx i2pi(0.0, pi2);
  std::string last_err;
  for (double scale : kPerturb) {
    double r = radius * scale;
    try {
      // dip scan: a sharp V in log|f| against the local linear trend
      // flags a zero (numerically) on the circle. Second differences
      // cancel smooth variation however steep; the threshold floats on
      // the median so curved-but-regular profiles stay clear.
      {
        std::vector<double> lm(256), sd(256);
        for (int i = 0; i < 256; ++i)
          lm[i] = f.log_abs(center + std::polar(r, pi2 * i / 256.0));
        for (int i = 0; i < 256; ++i)
          sd[i] = lm[i] - 0.5 * (lm[(i + 255) % 256] + lm[(i + 1) % 256]);
        std::vector<double> mags;
        for (double v : sd)
          if (std::isfinite(v)) mags.push_back(std::fabs(v));
        std::sort(mags.begin(), mags.end());
        double scale = mags.empty() ? 0.0 : mags[mags.size() / 2];
        bool dip = false;
        for (double v : sd)
          if (!(v > -(9.0 + 4.0 * scale))) dip = true;
        if (dip) {
          last_err = "boundary |f| dip detected";
          continue;
        }
      }
      auto path = contour::PathSpec::circle(center, r);
      Cplx val = contour::integrate_along_path(
                     [&](Cplx z) { return f.log_deriv(z); }, path,
                     std::min(0.02, std::max(tol, 1e-12))) /
                 i2pi;
      long n = std::lround(val.real());
      if (std::abs(val - Cplx(static_cast<double>(n))) >= 0.1) {
        last_err = "argument-principle integral not close to an integer";
        continue;
      }
      if (n < 0) {
        last_err = "negative winding (pole inside disc?)";
        continue;
      }
      return static_cast<int>(n);
    } catch (const NumericsError& e) {
      last_err = e.what();
    } catch (const DomainError& e) {
      last_err = e.what();
    }
  }
  throw NumericsError("boundary zero unresolved after radius perturbation: " + last_err);
}

inline int count_zeros_disc(const Expr& f, Cplx center, double radius, double tol,
                            const Config& cfg = {}) {
  return count_zeros_disc(AnalyticFn::from_expr(f), center, radius, tol, cfg);
}

namespace detail {

struct Locator {
  const AnalyticFn& f;
  const Config& cfg;
  double tol;
  std::vector<ZeroRecord> found;

  // Newton from the box centre for an m-fold zero; multiplicity comes
  // from the enclosing winding count, not from Newton behaviour.
  std::optional<ZeroRecord> refine(const Box& b, int m) {
    Cplx z = b.center();
    double la = f.log_abs(z);
    double step_abs = 0;
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      if (std::exp(la) <= tol) break;
      Cplx ld;
      try {
        ld = f.log_deriv(z);
      } catch (const DomainError&) {
        return std::nullopt;  // landed exactly on a zero of a base factor
      }
      if (!std::isfinite(ld.real()) || !std::isfinite(ld.imag()) || std::abs(ld) == 0.0)
        return std::nullopt;
      Cplx step = -static_cast<double>(m) / ld;
      double damp = 1.0;
      Cplx znew;
      double lnew = 0;
      int tries = 0;
      for (; tries < 8; ++tries) {
        znew = z + damp * step;
        lnew = f.log_abs(znew);
        if (lnew < la + 0.2) break;
        damp *= 0.5;
      }
      if (tries == 8) return std::nullopt;
      step_abs = std::abs(damp * step);
      z = znew;
      la = lnew;
      if (std::abs(z - b.center()) > 1.5 * b.diag()) return std::nullopt;
    }
    if (std::exp(la) > tol) return std::nullopt;
    // the refined point must lie in this box, or the zero belongs to a
    // sibling and would be double-counted
    double slack_x = 1e-7 * b.width(), slack_y = 1e-7 * b.height();
    if (z.real() < b.x0 - slack_x || z.real() > b.x1 + slack_x ||
        z.imag() < b.y0 - slack_y || z.imag() > b.y1 + slack_y)
      return std::nullopt;
    // confirm the multiplicity on a small circle around the refined point
    double rho = std::max({16.0 * step_abs, 1e-12 * (1.0 + std::abs(z)), 1e-13});
    rho = std::min(rho, 0.45 * std::min(b.width(), b.height()));
    if (rho <= 0) return std::nullopt;
    try {
      const double pi2 = 2 * 3.141592653589793238462643383279502884;
      double wind = phase_delta(
          f, [&](double t) { return z + std::polar(rho, pi2 * t); }, 0.0, 1.0);
      if (std::lround(wind / pi2) != m) return std::nullopt;
    } catch (const NumericsError&) {
      return std::nullopt;
    }
    return ZeroRecord{z, m, std::exp(la), false};
  }

  void visit(const Box& b, int count, int depth) {
    if (count == 0) return;
    if (auto rec = refine(b, count)) {
      found.push_back(*rec);
      return;
    }
    if (depth >= cfg.quadrisect_max_depth || b.diag() < cfg.box_min_size) {
      found.push_back({b.center(), count, std::exp(f.log_abs(b.center())), true});
      return;
    }
    subdivide(b, count, depth);
  }

  void subdivide(const Box& b, int count, int depth) {
    static constexpr double kShift[] = {0.0, 0.013, -0.017, 0.029, -0.037};
    for (double sh : kShift) {
      double mx = b.x0 + (0.5 + sh) * b.width();
      double my = b.y0 + (0.5 + sh * 0.7) * b.height();
      Box kids[4] = {{b.x0, mx, b.y0, my},
                     {mx, b.x1, b.y0, my},
                     {b.x0, mx, my, b.y1},
                     {mx, b.x1, my, b.y1}};
      int counts[4];
      bool ok = true;
      int total = 0;
      try {
        for (int k = 0; k < 4; ++k) {
          counts[k] = count_in_box(f, kids[k]);
          total += counts[k];
        }
      } catch (const NumericsError&) {
        ok = false;
      }
      if (!ok || total != count) continue;  // shifted midline hits a zero
      for (int k = 0; k < 4; ++k) visit(kids[k], counts[k], depth + 1);
      return;
    }
    // every shift failed; give up on splitting and report the box whole
    found.push_back({b.center(), count, std::exp(f.log_abs(b.center())), true});
  }
};

}  // namespace detail

// All zeros of f in the closed disc |z - center| <= radius. Multiplicity
// sums match count_zeros_disc; clustered zeros below the subdivision
// floor come back as one flagged record.
inline std::vector<ZeroRecord> locate_zeros(const AnalyticFn& f, Cplx center, double radius,
                                            double tol, const Config& cfg = {}) {
  int total = count_zeros_disc(f, center, radius, std::min(tol, 1e-6), cfg);
  std::vector<ZeroRecord> out;
  if (total == 0) return out;
  detail::Locator loc{f, cfg, std::max(tol, 1e-14), {}};
  // root box padded asymmetrically so midlines avoid symmetric zero lattices
  static constexpr double kPad[] = {1.0, 1.0041, 1.0087, 1.0133};
  bool started = false;
  for (double pad : kPad) {
    detail::Box root{center.real() - radius * 1.0031 * pad,
                     center.real() + radius * 1.0017 * pad,
                     center.imag() - radius * 1.0023 * pad,
                     center.imag() + radius * 1.0009 * pad};
    try {
      int root_count = detail::count_in_box(f, root);
      loc.visit(root, root_count, 0);
      started = true;
      break;
    } catch (const NumericsError&) {
      loc.found.clear();
    }
  }
  if (!started) throw NumericsError("could not establish a zero-free bounding box");
  for (const auto& r : loc.found)
    if (std::abs(r.location - center) <= radius * (1.0 + 1e-9)) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

inline std::vector<ZeroRecord> locate_zeros(const Expr& f, Cplx center, double radius,
                                            double tol, const Config& cfg = {}) {
  return locate_zeros(AnalyticFn::from_expr(f), center, radius, tol, cfg);
}

// n(r) over the given radii plus the log-integrated N(r). The quadrature
// grid refines each gap geometrically; below the smallest radius the
// count is probed down to radii[0]/32.
inline CountingData counting_function(const AnalyticFn& f, const std::vector<double>& radii,
                                      const Config& cfg = {}) {
  if (radii.empty()) throw PreconditionError("radii list is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 1.0) throw PreconditionError("radii must be >= 1");
    if (i && radii[i] <= radii[i - 1]) throw PreconditionError("radii must increase");
  }
  CountingData out;
  out.radii = radii;
  // multiplicity at the origin from a small winding circle
  const double pi2 = 2 * 3.141592653589793238462643383279502884;
  {
    double w = detail::phase_delta(
        f, [&](double t) { return std::polar(1e-4, pi2 * t); }, 0.0, 1.0);
    out.n0 = static_cast<int>(std::lround(w / pi2));
  }

  std::map<double, int> cache;
  auto n_at = [&](double t) {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    int n = count_zeros_disc(f, 0.0, t, 1e-8, cfg);
    cache.emplace(t, n);
    return n;
  };

  std::vector<double> grid;
  for (int k = 5; k >= 1; --k) grid.push_back(radii.front() / std::pow(2.0, k));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    grid.push_back(radii[i]);
    if (i + 1 < radii.size()) {
      double ratio = radii[i + 1] / radii[i];
      for (int j = 1; j <= 3; ++j) grid.push_back(radii[i] * std::pow(ratio, j / 4.0));
    }
  }
  std::sort(grid.begin(), grid.end());

  CompensatedSum acc;
  std::size_t gi = 0;
  double prev_t = grid.front();
  double prev_v = static_cast<double>(n_at(prev_t) - out.n0) / prev_t;
  ++gi;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    while (gi < grid.size() && grid[gi] <= radii[i] * (1 + 1e-15)) {
      double t = grid[gi];
      double v = static_cast<double>(n_at(t) - out.n0) / t;
      acc += 0.5 * (v + prev_v) * (t - prev_t);
      prev_t = t;
      prev_v = v;
      ++gi;
    }
    int n = n_at(radii[i]);
    out.n_values.push_back(n);
    if (n > 0) out.zero_free = false;
    out.N_values.push_back(acc.value() + out.n0 * std::log(radii[i]));
  }
  return out;
}

inline CountingData counting_function(const Expr& f, const std::vector<double>& radii,
                                      const Config& cfg = {}) {
  return counting_function(AnalyticFn::from_expr(f), radii, cfg);
}

}  // namespace bltk::zeros
