#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "bltk/errors.hpp"

namespace bltk {

// Value and derivatives of an analytic function at one point, up to third
// order. Arithmetic follows the Leibniz and Faa di Bruno rules truncated
// at `order`; entries above `order` are not meaningful.
struct Jet {
  std::array<Cplx, 4> d{};  // f, f', f'', f'''
  int order = 3;

  static Jet constant(Cplx c, int order) {
    Jet j;
    j.order = order;
    j.d[0] = c;
    return j;
  }
  static Jet variable(Cplx z, int order) {
    Jet j;
    j.order = order;
    j.d[0] = z;
    if (order >= 1) j.d[1] = 1.0;
    return j;
  }
  Cplx value() const { return d[0]; }
  Cplx d1() const { return d[1]; }
  Cplx d2() const { return d[2]; }
  Cplx d3() const { return d[3]; }
};

namespace detail {
inline int jorder(const Jet& a, const Jet& b) { return a.order < b.order ? a.order : b.order; }
}

// Jet of f' from a jet of f (one order lower).
inline Jet jet_derivative(const Jet& f) {
  Jet r;
  r.order = f.order - 1;
  if (r.order < 0) throw PreconditionError("cannot differentiate an order-0 jet");
  for (int k = 0; k <= r.order; ++k) r.d[k] = f.d[k + 1];
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.order = detail::jorder(a, b);
  for (int k = 0; k <= r.order; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.order = detail::jorder(a, b);
  for (int k = 0; k <= r.order; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  for (int k = 0; k <= r.order; ++k) r.d[k] = -r.d[k];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.order = detail::jorder(a, b);
  r.d[0] = a.d[0] * b.d[0];
  if (r.order >= 1) r.d[1] = a.d[1] * b.d[0] + a.d[0] * b.d[1];
  if (r.order >= 2) r.d[2] = a.d[2] * b.d[0] + 2.0 * a.d[1] * b.d[1] + a.d[0] * b.d[2];
  if (r.order >= 3)
    r.d[3] = a.d[3] * b.d[0] + 3.0 * a.d[2] * b.d[1] + 3.0 * a.d[1] * b.d[2] + a.d[0] * b.d[3];
  return r;
}

inline Jet operator*(Cplx c, const Jet& a) {
  Jet r = a;
  for (int k = 0; k <= r.order; ++k) r.d[k] *= c;
  return r;
}
inline Jet operator*(const Jet& a, Cplx c) { return c * a; }
inline Jet operator+(const Jet& a, Cplx c) { Jet r = a; r.d[0] += c; return r; }
inline Jet operator+(Cplx c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, Cplx c) { Jet r = a; r.d[0] -= c; return r; }
inline Jet operator-(Cplx c, const Jet& a) { return c + (-a); }

// Composition f(u) for a scalar function with derivatives f0..f3 at u.d[0].
inline Jet compose(const std::array<Cplx, 4>& f, const Jet& u) {
  Jet r;
  r.order = u.order;
  const Cplx u1 = u.d[1], u2 = u.d[2], u3 = u.d[3];
  r.d[0] = f[0];
  if (r.order >= 1) r.d[1] = f[1] * u1;
  if (r.order >= 2) r.d[2] = f[2] * u1 * u1 + f[1] * u2;
  if (r.order >= 3) r.d[3] = f[3] * u1 * u1 * u1 + 3.0 * f[2] * u1 * u2 + f[1] * u3;
  return r;
}

inline Jet jet_inv(const Jet& v) {
  const Cplx v0 = v.d[0];
  if (std::abs(v0) == 0.0) throw DomainError("division by zero value");
  const Cplx w = 1.0 / v0;
  return compose({w, -w * w, 2.0 * w * w * w, -6.0 * w * w * w * w}, v);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * jet_inv(b); }
inline Jet operator/(const Jet& a, Cplx c) { return a * (1.0 / c); }
inline Jet operator/(Cplx c, const Jet& b) { return c * jet_inv(b); }

inline Jet jet_exp(const Jet& u) {
  const Cplx e = std::exp(u.d[0]);
  return compose({e, e, e, e}, u);
}

namespace detail {
inline void require_off_cut(Cplx z, const char* fn) {
  if (std::abs(z) == 0.0) throw DomainError(std::string(fn) + " at zero", z);
  if (z.imag() == 0.0 && z.real() < 0.0)
    throw DomainError(std::string(fn) + " on branch cut", z);
}
}

inline Jet jet_log(const Jet& u) {
  detail::require_off_cut(u.d[0], "log");
  const Cplx w = 1.0 / u.d[0];
  return compose({std::log(u.d[0]), w, -w * w, 2.0 * w * w * w}, u);
}

inline Jet jet_sqrt(const Jet& u) {
  detail::require_off_cut(u.d[0], "sqrt");
  const Cplx s = std::sqrt(u.d[0]);
  const Cplx w = 1.0 / u.d[0];
  return compose({s, 0.5 * s * w, -0.25 * s * w * w, 0.375 * s * w * w * w}, u);
}

inline Jet jet_sin(const Jet& u) {
  const Cplx s = std::sin(u.d[0]), c = std::cos(u.d[0]);
  return compose({s, c, -s, -c}, u);
}

inline Jet jet_cos(const Jet& u) {
  const Cplx s = std::sin(u.d[0]), c = std::cos(u.d[0]);
  return compose({c, -s, -c, s}, u);
}

inline Jet jet_tan(const Jet& u) {
  Jet s = jet_sin(u), c = jet_cos(u);
  if (std::abs(c.d[0]) < 1e-14 * std::max(1.0, std::abs(s.d[0])))
    throw DomainError("tan at a pole", u.d[0]);
  return s / c;
}

inline Jet jet_sinh(const Jet& u) {
  const Cplx s = std::sinh(u.d[0]), c = std::cosh(u.d[0]);
  return compose({s, c, s, c}, u);
}

inline Jet jet_cosh(const Jet& u) {
  const Cplx s = std::sinh(u.d[0]), c = std::cosh(u.d[0]);
  return compose({c, s, c, s}, u);
}

// Integer powers by repeated multiplication, so z^2 stays cut-free.
inline Jet jet_pow_int(const Jet& u, long n) {
  if (n == 0) return Jet::constant(1.0, u.order);
  bool neg = n < 0;
  unsigned long m = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  Jet acc = Jet::constant(1.0, u.order);
  Jet base = u;
  while (m) {
    if (m & 1) acc = acc * base;
    m >>= 1;
    if (m) base = base * base;
  }
  return neg ? jet_inv(acc) : acc;
}

// General power w^c = exp(c log w), principal log.
inline Jet jet_pow(const Jet& u, const Jet& c) { return jet_exp(c * jet_log(u)); }

}  // namespace bltk
