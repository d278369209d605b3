#pragma once

// Integration of linear ODEs y^(d) + c_{d-1} y^(d-1) + ... + c_0 y = 0
// (d = 2 or 3) along paths in the plane.
//
// Two steppers share one driver loop:
//  - RK45: Dormand-Prince 5(4) embedded pair with PI step control. The
//    general-purpose route.
//  - Magnus4: 4th-order Gauss-Magnus for the pair form y'' + A y = 0.
//    Each step multiplies the solution matrix by exp(Omega) with Omega
//    traceless, so the Wronskian of a solution pair is preserved to
//    rounding even over millions of oscillation periods. Used for the
//    very long high-phase integrations where an RK pair would need an
//    unaffordable tolerance to keep the Wronskian pinned.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "bltk/expr.hpp"
#include "bltk/path.hpp"
#include "bltk/sum.hpp"

namespace bltk::contour {

struct OdeNode {
  Cplx z;
  std::vector<Cplx> y;  // state: y, y', (y'') for one column
  double step_error = 0.0;
};

struct OdeTrajectory {
  std::vector<OdeNode> nodes;     // subsampled; first and last always present
  double wronskian_drift = 0.0;   // tracked over every accepted step
  std::size_t total_steps = 0;
  double max_step_error = 0.0;
};

enum class OdeMethod { RK45, Magnus4 };

struct OdeOptions {
  OdeMethod method = OdeMethod::RK45;
  std::size_t max_steps = 100000000;
  std::size_t max_nodes = 4000;
  double max_step_len = 0.0;  // > 0: cap on the arc length of one step
};

namespace detail {

// State matrix: dim x ncols, flattened column-major (col*dim + row).
using StateMat = std::vector<Cplx>;

struct StepSink {
  std::function<void(Cplx z, const StateMat&, double err)> on_accept;
};

inline double err_norm(const StateMat& e, const StateMat& y0, const StateMat& y1,
                       double tol) {
  double mx = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double scale = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    double v = std::abs(e[i]) / scale;
    if (v > mx) mx = v;
  }
  return mx;
}

// ---- Dormand-Prince 5(4) ----

template <class Rhs>
struct Dopri5 {
  Rhs rhs;  // rhs(t, const StateMat&, StateMat&)
  int dim;
  int ncols;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  // stage coefficients
  void step(double t, double h, const StateMat& y, StateMat& out, StateMat& err,
            StateMat* k_workspace) {
    StateMat* k = k_workspace;  // 7 slots
    auto axpy = [&](StateMat& dst, const StateMat& base,
                    std::initializer_list<std::pair<double, int>> terms) {
      dst = base;
      for (auto [a, j] : terms)
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += h * a * k[j][i];
    };
    StateMat tmp(y.size());
    rhs(t, y, k[0]);
    axpy(tmp, y, {{1.0 / 5, 0}});
    rhs(t + c2 * h, tmp, k[1]);
    axpy(tmp, y, {{3.0 / 40, 0}, {9.0 / 40, 1}});
    rhs(t + c3 * h, tmp, k[2]);
    axpy(tmp, y, {{44.0 / 45, 0}, {-56.0 / 15, 1}, {32.0 / 9, 2}});
    rhs(t + c4 * h, tmp, k[3]);
    axpy(tmp, y,
         {{19372.0 / 6561, 0}, {-25360.0 / 2187, 1}, {64448.0 / 6561, 2}, {-212.0 / 729, 3}});
    rhs(t + c5 * h, tmp, k[4]);
    axpy(tmp, y,
         {{9017.0 / 3168, 0}, {-355.0 / 33, 1}, {46732.0 / 5247, 2}, {49.0 / 176, 3},
          {-5103.0 / 18656, 4}});
    rhs(t + h, tmp, k[5]);
    axpy(out, y,
         {{35.0 / 384, 0}, {500.0 / 1113, 2}, {125.0 / 192, 3}, {-2187.0 / 6784, 4},
          {11.0 / 84, 5}});
    rhs(t + h, out, k[6]);
    // embedded 4th-order difference
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    err.assign(y.size(), Cplx{});
    for (std::size_t i = 0; i < y.size(); ++i)
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                    e6 * k[5][i] + e7 * k[6][i]);
  }
};

// ---- 4th order Gauss-Magnus for y'' + A y = 0 ----

struct MagnusCoeffs {
  Cplx p, q, d;  // Omega = [[d, p], [q, -d]]
};

template <class AFn>
inline MagnusCoeffs magnus_omega(AFn&& A, const Piece& piece, double t, double h) {
  static const double g = 0.28867513459481288225457439025098;  // sqrt(3)/6
  double t1 = t + (0.5 - g) * h, t2 = t + (0.5 + g) * h;
  Cplx z1 = piece.at(t1), z2 = piece.at(t2);
  Cplx d1 = piece.dz(t1), d2 = piece.dz(t2);
  Cplx A1 = A(z1), A2 = A(z2);
  MagnusCoeffs m;
  m.p = 0.5 * h * (d1 + d2);
  m.q = -0.5 * h * (d1 * A1 + d2 * A2);
  m.d = (std::sqrt(3.0) / 12.0) * h * h * d1 * d2 * (A2 - A1);
  return m;
}

// Apply exp(Omega) to the 2 x ncols state, Omega traceless 2x2.
// Returns the determinant defect of the rounded transfer matrix; the
// exact map has det exp(Omega) = e^{tr Omega} = 1, so the running sum of
// defects measures the Wronskian wander of a solution pair without the
// catastrophic cancellation of evaluating f1 f2' - f1' f2 where the
// solutions are exponentially large.
inline Cplx magnus_apply(const MagnusCoeffs& m, StateMat& y, int ncols) {
  Cplx w2 = m.d * m.d + m.p * m.q;  // -det(Omega)
  Cplx w = std::sqrt(w2);
  Cplx ch, shc;  // cosh(w), sinh(w)/w
  if (std::abs(w) < 1e-4) {
    ch = 1.0 + w2 * (0.5 + w2 / 24.0);
    shc = 1.0 + w2 * (1.0 / 6.0 + w2 / 120.0);
  } else {
    ch = std::cosh(w);
    shc = std::sinh(w) / w;
  }
  const Cplx a = ch + shc * m.d, b = shc * m.p;
  const Cplx c = shc * m.q, e = ch - shc * m.d;
  for (int col = 0; col < ncols; ++col) {
    Cplx y0 = y[2 * col], y1 = y[2 * col + 1];
    y[2 * col] = a * y0 + b * y1;
    y[2 * col + 1] = c * y0 + e * y1;
  }
  return a * e - b * c - 1.0;
}

// Shared adaptive driver. Stepper is a callable attempting one step of
// size h from (piece,t): fills ynew and a scaled error estimate.
template <class TryStep>
void drive(const std::vector<Piece>& pieces, StateMat& y, double tol,
           const OdeOptions& opt, TryStep&& try_step, StepSink& sink) {
  std::size_t steps = 0;
  double err_prev = 1.0;
  // step size carried across pieces in arc-length units
  double h_len = pieces.front().length() * 1e-2;
  for (const auto& piece : pieces) {
    const double len = piece.length();
    if (len <= 0) continue;
    double t = 0.0;
    double h = std::min(1.0, h_len / len);
    while (t < 1.0) {
      if (opt.max_step_len > 0 && h * len > opt.max_step_len) h = opt.max_step_len / len;
      if (h > 1.0 - t) h = 1.0 - t;
      StateMat ynew;
      double en = try_step(piece, t, h, y, ynew);
      if (++steps > opt.max_steps) throw NumericsError("ODE max step count exceeded");
      if (!(en <= 1.0)) {  // reject (also catches NaN)
        if (!std::isfinite(en)) h *= 0.1;
        else h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        if (h * len < 1e-14 * (1.0 + std::abs(piece.at(t))))
          throw NumericsError("ODE step size underflow (coefficient singularity?)");
        continue;
      }
      t += h;
      y = std::move(ynew);
      if (sink.on_accept) sink.on_accept(piece.at(t), y, en * tol);
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) *
                   std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
      err_prev = std::max(en, 1e-10);
      h *= std::min(5.0, std::max(0.2, fac));
      h_len = h * len;
    }
  }
}

}  // namespace detail

// Low-level engine: integrate all columns simultaneously so every column
// shares the same accepted nodes. CoeffFn: void(Cplx z, Cplx* c) filling
// the dim lowest coefficients. Returns the max Wronskian-ratio wander
// |prod det - 1| measured from per-step transfer determinants (Magnus
// only; -1 when the stepper does not expose it).
template <class CoeffFn>
double integrate_linear_system(CoeffFn&& coeff, int dim, const PathSpec& path,
                               detail::StateMat& y, int ncols, double tol,
                               const OdeOptions& opt, detail::StepSink sink) {
  auto pieces = path.pieces();
  if (opt.method == OdeMethod::Magnus4) {
    if (dim != 2) throw PreconditionError("Magnus stepper requires dim == 2");
    auto A = [&coeff](Cplx z) {
      Cplx c[3] = {};
      coeff(z, c);
      return c[0];
    };
    Cplx pending_defect{};
    CompensatedSum cum_r, cum_i;  // running complex sum of defects
    double max_defect = 0.0;
    auto try_step = [&](const Piece& piece, double t, double h, const detail::StateMat& y0,
                        detail::StateMat& ynew) {
      detail::StateMat yh = y0, y2 = y0;
      detail::magnus_apply(detail::magnus_omega(A, piece, t, h), yh, ncols);
      Cplx d1 = detail::magnus_apply(detail::magnus_omega(A, piece, t, 0.5 * h), y2, ncols);
      Cplx d2 =
          detail::magnus_apply(detail::magnus_omega(A, piece, t + 0.5 * h, 0.5 * h), y2, ncols);
      pending_defect = d1 + d2;
      detail::StateMat diff(y0.size());
      for (std::size_t i = 0; i < y0.size(); ++i) diff[i] = yh[i] - y2[i];
      ynew = std::move(y2);
      return detail::err_norm(diff, y0, ynew, tol);
    };
    detail::StepSink wrapped{[&](Cplx z, const detail::StateMat& s, double err) {
      cum_r += pending_defect.real();
      cum_i += pending_defect.imag();
      max_defect = std::max(max_defect, std::hypot(cum_r.value(), cum_i.value()));
      if (sink.on_accept) sink.on_accept(z, s, err);
    }};
    detail::drive(pieces, y, tol, opt, try_step, wrapped);
    return max_defect;
  }
  // RK45 on the companion system
  auto rhs = [&coeff, dim, ncols](const Piece& piece, double t, const detail::StateMat& s,
                                  detail::StateMat& out) {
    Cplx z = piece.at(t), dz = piece.dz(t);
    Cplx c[3] = {};
    coeff(z, c);
    out.assign(s.size(), Cplx{});
    for (int col = 0; col < ncols; ++col) {
      const Cplx* yv = &s[col * dim];
      Cplx* ov = &out[col * dim];
      for (int k = 0; k + 1 < dim; ++k) ov[k] = dz * yv[k + 1];
      Cplx top{};
      for (int k = 0; k < dim; ++k) top -= c[k] * yv[k];
      ov[dim - 1] = dz * top;
    }
  };
  std::array<detail::StateMat, 7> kbuf;
  auto try_step = [&](const Piece& piece, double t, double h, const detail::StateMat& y0,
                      detail::StateMat& ynew) {
    auto rhs_t = [&](double tt, const detail::StateMat& s, detail::StateMat& out) {
      rhs(piece, tt, s, out);
    };
    detail::Dopri5<decltype(rhs_t)> stepper{rhs_t, dim, ncols};
    detail::StateMat err;
    stepper.step(t, h, y0, ynew, err, kbuf.data());
    return detail::err_norm(err, y0, ynew, tol);
  };
  detail::drive(pieces, y, tol, opt, try_step, sink);
  return -1.0;
}

namespace detail {

struct Recorder {
  int dim, ncols;
  double record_every;  // arc-length stride
  Cplx last_z{};
  double since = 1e300;
  std::vector<OdeNode> nodes;  // y holds all columns concatenated
  double wdrift = 0.0;
  Cplx w0{};
  bool have_w0 = false;
  std::size_t steps = 0;
  double max_err = 0.0;

  void operator()(Cplx z, const StateMat& y, double err) {
    ++steps;
    max_err = std::max(max_err, err);
    if (have_w0) {
      Cplx w = y[0] * y[3] - y[1] * y[2];
      wdrift = std::max(wdrift, std::abs(w - w0) / std::max(1.0, std::abs(w0)));
    }
    since += std::abs(z - last_z);
    last_z = z;
    if (since >= record_every) {
      nodes.push_back({z, y, err});
      since = 0.0;
    }
  }
};

}  // namespace detail

// Solve y^(dim) + coeffs[dim-1] y^(dim-1) + ... + coeffs[0] y = 0 for
// several initial columns at once; trajectories share their node set.
inline std::vector<OdeTrajectory> solve_linear_ode_basis(
    const std::vector<JetFn>& coeffs, int dim, const PathSpec& path,
    const std::vector<std::vector<Cplx>>& y0s, double tol, OdeOptions opt = {}) {
  if (dim != 2 && dim != 3) throw PreconditionError("dim must be 2 or 3");
  if (static_cast<int>(coeffs.size()) > dim)
    throw PreconditionError("too many coefficients for order");
  int ncols = static_cast<int>(y0s.size());
  detail::StateMat y(static_cast<std::size_t>(dim) * ncols);
  for (int col = 0; col < ncols; ++col) {
    if (static_cast<int>(y0s[col].size()) != dim)
      throw PreconditionError("initial state size must equal dim");
    for (int k = 0; k < dim; ++k) y[col * dim + k] = y0s[col][k];
  }
  auto coeff = [&coeffs](Cplx z, Cplx* c) {
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      c[k] = coeffs[k].empty() ? Cplx{} : coeffs[k](z);
  };

  detail::Recorder rec;
  rec.dim = dim;
  rec.ncols = ncols;
  rec.record_every = path.total_length() / static_cast<double>(opt.max_nodes);
  rec.last_z = path.start();
  if (dim == 2 && ncols >= 2) {
    rec.w0 = y[0] * y[3] - y[1] * y[2];
    rec.have_w0 = true;
  }
  rec.nodes.push_back({path.start(), y, 0.0});
  rec.since = 0.0;

  detail::StepSink sink{[&rec](Cplx z, const detail::StateMat& s, double err) {
    rec(z, s, err);
  }};
  double det_drift = integrate_linear_system(coeff, dim, path, y, ncols, tol, opt, sink);
  if (rec.nodes.back().y != y) rec.nodes.push_back({path.end(), y, rec.max_err});

  double pair_drift = det_drift >= 0.0 ? det_drift : rec.wdrift;
  std::vector<OdeTrajectory> out(ncols);
  for (int col = 0; col < ncols; ++col) {
    OdeTrajectory& tr = out[col];
    tr.total_steps = rec.steps;
    tr.max_step_error = rec.max_err;
    tr.wronskian_drift = (dim == 2 && ncols >= 2 && col < 2) ? pair_drift : 0.0;
    tr.nodes.reserve(rec.nodes.size());
    for (const auto& n : rec.nodes) {
      OdeNode m;
      m.z = n.z;
      m.step_error = n.step_error;
      m.y.assign(n.y.begin() + col * dim, n.y.begin() + (col + 1) * dim);
      tr.nodes.push_back(std::move(m));
    }
  }
  return out;
}

inline OdeTrajectory solve_linear_ode(const std::vector<JetFn>& coeffs, int dim,
                                      const PathSpec& path, const std::vector<Cplx>& y0,
                                      double tol, OdeOptions opt = {}) {
  return solve_linear_ode_basis(coeffs, dim, path, {y0}, tol, opt)[0];
}

// Max relative Wronskian wander between two trajectories sharing a node set.
inline double wronskian_drift(const OdeTrajectory& t1, const OdeTrajectory& t2) {
  if (t1.nodes.size() != t2.nodes.size())
    throw PreconditionError("trajectories have different node sets");
  double drift = 0.0;
  Cplx w0{};
  for (std::size_t i = 0; i < t1.nodes.size(); ++i) {
    const auto& a = t1.nodes[i];
    const auto& b = t2.nodes[i];
    if (std::abs(a.z - b.z) > 1e-9 * (1.0 + std::abs(a.z)))
      throw PreconditionError("trajectories have different node sets");
    Cplx w = a.y[0] * b.y[1] - a.y[1] * b.y[0];
    if (i == 0) {
      w0 = w;
      continue;
    }
    drift = std::max(drift, std::abs(w - w0) / std::max(1.0, std::abs(w0)));
  }
  return drift;
}

}  // namespace bltk::contour
