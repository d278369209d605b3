#pragma once

// Bank-Laine structure: extracting the coefficient A from a product
// E = f1 f2 of Wronskian-normalised solutions of y'' + A y = 0, the
// Schwarzian derivative, verification that a function is Bank-Laine
// (E' = +-1 at every zero), the special form E' = B E + 1, and the
// linearised third-order residual E''' + 4 A E' + 2 A' E.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bltk/config.hpp"
#include "bltk/zeros.hpp"

namespace bltk::banklaine {

// A = ((E')^2 - 2 E'' E - 1) / (4 E^2) from a jet of E (order >= 2).
inline Cplx coefficient_from_product(const Jet& E) {
  if (E.order < 2) throw PreconditionError("coefficient extraction needs a jet of order >= 2");
  if (std::abs(E.value()) == 0.0)
    throw DomainError("coefficient extraction at a zero of E");
  const Cplx e = E.value(), e1 = E.d1(), e2 = E.d2();
  return (e1 * e1 - 2.0 * e2 * e - 1.0) / (4.0 * e * e);
}

// S(U) = U'''/U' - (3/2)(U''/U')^2 from a jet of U (order 3).
inline Cplx schwarzian(const Jet& U) {
  if (U.order < 3) throw PreconditionError("Schwarzian needs a jet of order 3");
  if (std::abs(U.d1()) == 0.0) throw DomainError("critical point: U' = 0");
  const Cplx r2 = U.d2() / U.d1();
  return U.d3() / U.d1() - 1.5 * r2 * r2;
}

// B = (E' - 1) / E for the special form E' = B E + 1.
inline Cplx special_b(const Jet& E) {
  if (E.order < 1) throw PreconditionError("special form needs a jet of order >= 1");
  if (std::abs(E.value()) == 0.0) throw DomainError("special form undefined at a zero of E");
  return (E.d1() - 1.0) / E.value();
}

// |E''' + 4 A E' + 2 A' E| at z.
inline double third_order_residual(const JetFn& E, const JetFn& A, Cplx z) {
  Jet e = E.jet(z, 3);
  Jet a = A.jet(z, 1);
  return std::abs(e.d3() + 4.0 * a.value() * e.d1() + 2.0 * a.d1() * e.value());
}

struct ZeroSign {
  Cplx location{};
  int multiplicity = 1;
  int sign = 0;             // +1 / -1, or 0 when |E'| is not near 1
  Cplx derivative{};        // E' at the zero
  double sign_error = 0.0;  // |E'(zero) - sign|
};

struct VerifyReport {
  std::vector<ZeroSign> zeros;
  bool is_bank_laine = false;
  bool is_special = false;  // all signs +1
  double max_sign_error = 0.0;
  double max_abs_error = 0.0;  // max | |E'(zero)| - 1 |
  std::string failure;
};

// Locate all zeros of E in the disc and check each is simple with
// E'(zero) within tol of +1 or -1.
inline VerifyReport verify_bank_laine(const zeros::AnalyticFn& E, const JetFn& Ejet,
                                      Cplx center, double radius, double tol,
                                      const Config& cfg = {}) {
  VerifyReport rep;
  auto zs = zeros::locate_zeros(E, center, radius, std::min(tol, 1e-11), cfg);
  rep.is_bank_laine = true;
  rep.is_special = true;
  for (const auto& zr : zs) {
    ZeroSign s;
    s.location = zr.location;
    s.multiplicity = zr.multiplicity;
    if (zr.multiplicity != 1 || zr.clustered) {
      rep.is_bank_laine = false;
      rep.is_special = false;
      rep.failure = "multiple zero at " + std::to_string(zr.location.real()) +
                    (zr.location.imag() < 0 ? " - " : " + ") +
                    std::to_string(std::fabs(zr.location.imag())) + "i";
      rep.zeros.push_back(s);
      continue;
    }
    s.derivative = Ejet.jet(zr.location, 1).d1();
    double to_plus = std::abs(s.derivative - 1.0);
    double to_minus = std::abs(s.derivative + 1.0);
    s.sign = to_plus <= to_minus ? 1 : -1;
    s.sign_error = std::min(to_plus, to_minus);
    double abs_err = std::fabs(std::abs(s.derivative) - 1.0);
    rep.max_sign_error = std::max(rep.max_sign_error, s.sign_error);
    rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
    if (abs_err > tol || s.sign_error > tol) {
      rep.is_bank_laine = false;
      if (rep.failure.empty()) rep.failure = "derivative at a zero is not a unit of modulus 1";
    }
    if (s.sign != 1) rep.is_special = false;
    rep.zeros.push_back(s);
  }
  if (!rep.is_bank_laine) rep.is_special = false;
  return rep;
}

inline VerifyReport verify_bank_laine(const Expr& E, Cplx center, double radius, double tol,
                                      const Config& cfg = {}) {
  return verify_bank_laine(zeros::AnalyticFn::from_expr(E), JetFn(E), center, radius, tol, cfg);
}

}  // namespace bltk::banklaine
