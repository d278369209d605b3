#pragma once

// Registered, self-verifying example functions. Each entry carries the
// evaluators (parsed expressions or native quadrature-backed jets) and a
// list of machine-checkable assertions with tolerances.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bltk/asymptotics.hpp"
#include "bltk/banklaine.hpp"
#include "bltk/nevanlinna.hpp"
#include "bltk/quadrature.hpp"
#include "bltk/zeros.hpp"

namespace bltk::gallery {

struct CheckResult {
  std::string what;
  double measured = 0.0;
  double bound = 0.0;  // pass iff measured <= bound
  bool pass = false;
  static CheckResult of(std::string what, double measured, double bound) {
    CheckResult c;
    c.what = std::move(what);
    c.measured = measured;
    c.bound = bound;
    c.pass = measured <= bound;
    return c;
  }
};

struct EntryReport {
  std::string name;
  bool pass = false;
  std::vector<CheckResult> checks;
};

struct GalleryEntry {
  std::string name;
  std::string summary;
  std::optional<Expr> E_expr;
  std::optional<Expr> A_expr;
  JetFn E_fn;           // empty when the entry registers no product E
  JetFn A_fn;           // empty when no closed-form/native A is registered
  std::function<std::vector<CheckResult>(const Config&)> run;
};

namespace detail {

inline std::vector<Cplx> seeded_points(unsigned seed, int n, double radius,
                                       const JetFn& avoid_small = {}, double floor = 0.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Cplx> pts;
  while (static_cast<int>(pts.size()) < n) {
    Cplx z(radius * uni(rng), radius * uni(rng));
    if (std::abs(z) > radius) continue;
    if (!avoid_small.empty() && std::abs(avoid_small(z)) < floor) continue;
    pts.push_back(z);
  }
  return pts;
}

// Jet of the coefficient recovered from E (order <= 1), by jet arithmetic
// on the quotient ((E')^2 - 2 E'' E - 1) / (4 E^2).
inline Jet coefficient_jet(const JetFn& E, Cplx z, int order) {
  Jet e = E.jet(z, order + 2);
  Jet e1 = jet_derivative(e);
  Jet e2 = jet_derivative(e1);
  Jet num = e1 * e1 - 2.0 * (e2 * e) - Jet::constant(1.0, order);
  Jet den = 4.0 * (e * e);
  return num / den;
}

// h(z) = int_1^z (1 - e^-t)/t dt + c0, with closed-form derivatives.
struct QuadratureH {
  double c0;
  Expr hp = parse("(1 - exp(-z))/z");

  Jet jet(Cplx z, int order) const {
    Cplx val = c0;
    if (std::abs(z - 1.0) > 1e-14)
      val += contour::integrate_along_path(
          [this](Cplx t) { return eval_jet(hp, t, 0).value(); },
          contour::PathSpec::segment(1.0, z), 1e-12);
    Jet out = Jet::constant(val, order);
    if (order >= 1) {
      Jet d = eval_jet(hp, z, order - 1);
      for (int k = 1; k <= order; ++k) out.d[k] = d.d[k - 1];
    }
    return out;
  }
};

}  // namespace detail

inline const std::vector<GalleryEntry>& entries() {
  static const std::vector<GalleryEntry> table = [] {
    std::vector<GalleryEntry> v;

    {  // E = e^z with A = -(1 + e^{-2z})/4
      GalleryEntry g;
      g.name = "standardex";
      g.summary = "zero-free product e^z and its coefficient -(1+e^-2z)/4";
      g.E_expr = parse("exp(z)");
      g.A_expr = parse("-(1 + exp(-2*z))/4");
      g.E_fn = JetFn(*g.E_expr);
      g.A_fn = JetFn(*g.A_expr);
      Expr Ee = *g.E_expr, Ae = *g.A_expr;
      g.run = [Ee, Ae](const Config& cfg) {
        std::vector<CheckResult> out;
        JetFn E(Ee), A(Ae);
        double worst = 0;
        for (Cplx z : detail::seeded_points(cfg.seed + 11, 100, 5.0)) {
          Cplx got = banklaine::coefficient_from_product(E.jet(z, 2));
          worst = std::max(worst, std::abs(got - A(z)));
        }
        out.push_back(CheckResult::of("coefficient extraction matches closed form", worst, 1e-10));
        double res = 0;
        for (Cplx z : detail::seeded_points(cfg.seed + 12, 20, 3.0))
          res = std::max(res, banklaine::third_order_residual(E, A, z));
        out.push_back(CheckResult::of("third-order residual", res, 1e-9));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // E = e^{2z} + 1/2: coefficient is identically -1
      GalleryEntry g;
      g.name = "exp-bl";
      g.summary = "exponential-plus-constant product with constant coefficient";
      g.E_expr = parse("exp(2*z) + 1/2");
      g.A_expr = parse("-1");
      g.E_fn = JetFn(*g.E_expr);
      g.A_fn = JetFn(*g.A_expr);
      Expr Ee = *g.E_expr;
      g.run = [Ee](const Config& cfg) {
        std::vector<CheckResult> out;
        JetFn E(Ee);
        double worst = 0;
        for (Cplx z : detail::seeded_points(cfg.seed + 21, 20, 3.0, E, 1e-3)) {
          Cplx got = banklaine::coefficient_from_product(E.jet(z, 2));
          worst = std::max(worst, std::abs(got - Cplx(-1.0)));
        }
        out.push_back(CheckResult::of("coefficient is identically -1", worst, 1e-10));
        auto rep = banklaine::verify_bank_laine(Ee, 0.0, 3.0, 1e-8, cfg);
        out.push_back(CheckResult::of("product verifies with sign -1 zeros",
                                      rep.is_bank_laine && !rep.is_special ? 0.0 : 1.0, 0.5));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // E2 = exp(2 pi i z^2) sin(pi z)/pi
      GalleryEntry g;
      g.name = "e2";
      g.summary = "quadratic-phase twist of sin(pi z): zeros at the integers";
      g.E_expr = parse("exp(2*pi*i*z^2)*sin(pi*z)/pi");
      g.E_fn = JetFn(*g.E_expr);
      Expr Ee = *g.E_expr;
      g.run = [Ee](const Config& cfg) {
        std::vector<CheckResult> out;
        auto rep = banklaine::verify_bank_laine(Ee, 0.0, 5.5, 1e-8, cfg);
        bool zeros_ok = rep.is_bank_laine && rep.zeros.size() == 11;
        if (zeros_ok)
          for (std::size_t k = 0; k < rep.zeros.size(); ++k) {
            long kk = std::lround(rep.zeros[k].location.real());
            int expect = (kk % 2 == 0) ? 1 : -1;
            if (rep.zeros[k].sign != expect) zeros_ok = false;
          }
        out.push_back(CheckResult::of("11 simple zeros with alternating-parity signs",
                                      zeros_ok ? 0.0 : 1.0, 0.5));
        out.push_back(CheckResult::of("max sign error over zeros", rep.max_sign_error, 1e-8));
        // a critical point near z = 10 where the function is already small
        Expr Eprime = parse("exp(2*pi*i*z^2)*(4*i*z*sin(pi*z) + cos(pi*z))");
        auto crit = zeros::locate_zeros(Eprime, Cplx(10.0, 0.008), 0.3, 1e-10, cfg);
        double ecrit = 1e300;
        for (const auto& c : crit) ecrit = std::min(ecrit, std::abs(JetFn(Ee)(c.location)));
        out.push_back(CheckResult::of("|E| at the critical point near 10",
                                      crit.empty() ? 1e300 : ecrit, 0.05));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // E = sin z with A = 1/4
      GalleryEntry g;
      g.name = "sin";
      g.summary = "sin z as a product of Wronskian-normalised solutions, A = 1/4";
      g.E_expr = parse("sin(z)");
      g.A_expr = parse("1/4");
      g.E_fn = JetFn(*g.E_expr);
      g.A_fn = JetFn(*g.A_expr);
      Expr Ee = *g.E_expr;
      g.run = [Ee](const Config& cfg) {
        std::vector<CheckResult> out;
        JetFn E(Ee);
        double worst = 0;
        for (Cplx z : detail::seeded_points(cfg.seed + 31, 20, 3.0, E, 1e-3)) {
          Cplx got = banklaine::coefficient_from_product(E.jet(z, 2));
          worst = std::max(worst, std::abs(got - Cplx(0.25)));
        }
        out.push_back(CheckResult::of("coefficient is identically 1/4", worst, 1e-10));
        auto rep = banklaine::verify_bank_laine(Ee, 0.0, 7.0, 1e-9, cfg);
        bool ok = rep.is_bank_laine && rep.zeros.size() == 5;
        if (ok)
          for (std::size_t k = 0; k + 1 < rep.zeros.size(); ++k)
            if (rep.zeros[k].sign * rep.zeros[k + 1].sign != -1) ok = false;
        out.push_back(CheckResult::of("5 zeros with alternating signs", ok ? 0.0 : 1.0, 0.5));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // E = e^z - 1: special (E' = B E + 1 with B = 1)
      GalleryEntry g;
      g.name = "special-exp";
      g.summary = "e^z - 1: every zero has derivative +1, B = 1";
      g.E_expr = parse("exp(z) - 1");
      g.E_fn = JetFn(*g.E_expr);
      Expr Ee = *g.E_expr;
      g.run = [Ee](const Config& cfg) {
        std::vector<CheckResult> out;
        JetFn E(Ee);
        double worst = 0;
        for (Cplx z : detail::seeded_points(cfg.seed + 41, 20, 3.0, E, 1e-3))
          worst = std::max(worst, std::abs(banklaine::special_b(E.jet(z, 1)) - Cplx(1.0)));
        out.push_back(CheckResult::of("B = (E'-1)/E is identically 1", worst, 1e-12));
        auto rep = banklaine::verify_bank_laine(Ee, 0.0, 7.0, 1e-9, cfg);
        bool ok = rep.is_bank_laine && rep.is_special && rep.zeros.size() == 3;
        out.push_back(CheckResult::of("3 zeros, all with sign +1 (special)", ok ? 0.0 : 1.0, 0.5));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // A = -e^{2z} - e^z: deficiency of 0 is 1/2; for f'/f = e^z it is 1
      GalleryEntry g;
      g.name = "defexample";
      g.summary = "coefficient -e^2z - e^z with delta(0) = 1/2";
      g.A_expr = parse("-exp(2*z) - exp(z)");
      g.A_fn = JetFn(*g.A_expr);
      Expr Ae = *g.A_expr;
      g.run = [Ae](const Config& cfg) {
        std::vector<CheckResult> out;
        std::vector<double> radii{10.0, 20.0, 40.0};
        auto dA = nevan::deficiency_estimate(nevan::FunctionHandle::entire(Ae), 0.0, radii, cfg);
        out.push_back(CheckResult::of("deficiency of 0 for the coefficient (target 1/2)",
                                      std::fabs(dA.value - 0.5), 0.05));
        auto dL = nevan::deficiency_estimate(nevan::FunctionHandle::entire(parse("exp(z)")), 0.0,
                                             radii, cfg);
        out.push_back(CheckResult::of("deficiency of 0 for the log-derivative e^z (target 1)",
                                      std::fabs(dL.value - 1.0), 0.02));
        return out;
      };
      v.push_back(std::move(g));
    }

    {  // quadrature-defined h: E = e^h is zero-free, A decays on the ray
      GalleryEntry g;
      g.name = "sec9";
      g.summary = "E = e^h with h(z) = int_1^z (1-e^-t)/t dt + const; super-polynomial coefficient decay on the positive ray";
      Config defaults;
      auto h = std::make_shared<detail::QuadratureH>();
      h->c0 = defaults.exp_integral_const;
      g.E_fn = JetFn([h](Cplx z, int order) { return jet_exp(h->jet(z, order)); });
      JetFn E_fn = g.E_fn;
      g.A_fn = JetFn([E_fn](Cplx z, int order) {
        if (order > 1) throw PreconditionError("coefficient jets available to order 1 only");
        return detail::coefficient_jet(E_fn, z, order);
      });
      JetFn A_fn = g.A_fn;
      g.run = [A_fn, E_fn, h](const Config& cfg) {
        std::vector<CheckResult> out;
        auto tail = asym::tail_integral(A_fn, 0.0, 5.0, 60.0, 1e-9);
        out.push_back(CheckResult::of("tail integral int_5^60 r|A| below 1/2", tail.value, 0.5));
        for (double x : {10.0, 20.0, 30.0}) {
          double a = std::abs(A_fn(x));
          out.push_back(CheckResult::of("|A(" + std::to_string(static_cast<int>(x)) +
                                            ")| below x^-6",
                                        a, std::pow(x, -6.0)));
        }
        // g1 = exp(h/2 - (log z)/2 + K/2), K = int_x^inf (e^-h(t) - 1/t) dt
        for (double x : {10.0, 20.0, 30.0}) {
          auto G = [&](Cplx t) {
            return std::exp(-h->jet(t, 0).value()) - 1.0 / t;
          };
          Cplx K = contour::integrate_along_path(G, contour::PathSpec::segment(x, x + 60.0),
                                                 1e-12);
          Cplx g1 = std::exp(0.5 * h->jet(x, 0).value() - 0.5 * std::log(x) + 0.5 * K);
          out.push_back(CheckResult::of(
              "|g1(" + std::to_string(static_cast<int>(x)) + ") - 1|", std::abs(g1 - 1.0), 1e-3));
        }
        return out;
      };
      v.push_back(std::move(g));
    }

    return v;
  }();
  return table;
}

inline std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.name);
  return out;
}

inline const GalleryEntry& find(const std::string& name) {
  for (const auto& e : entries())
    if (e.name == name) return e;
  throw PreconditionError("unknown gallery entry '" + name + "'");
}

inline EntryReport verify_example(const std::string& name, const Config& cfg = {}) {
  const auto& e = find(name);
  EntryReport rep;
  rep.name = name;
  rep.checks = e.run(cfg);
  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace bltk::gallery
