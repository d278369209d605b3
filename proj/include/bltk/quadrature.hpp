#pragma once

// Adaptive Gauss-Kronrod 7/15 quadrature for contour integrals along a
// PathSpec and for real-axis integrals. Error per panel is estimated from
// the Gauss/Kronrod difference; panels subdivide worst-first.

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "bltk/path.hpp"
#include "bltk/sum.hpp"

namespace bltk::contour {

namespace gk {

// 15-point Kronrod abscissae on [-1,1] (odd entries are the Gauss-7 points).
inline constexpr double xk[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double wk[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double wg[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

}  // namespace gk

// One G7/K15 evaluation of \int f(z(t)) z'(t) dt over [t0,t1] of a piece.
template <class F>
inline void gk15_piece(F&& f, const Piece& piece, double t0, double t1, Cplx& kronrod,
                       double& err) {
  const double hw = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
  Cplx k{}, g{};
  for (int i = 0; i < 15; ++i) {
    double t = mid + hw * gk::xk[i];
    Cplx v = f(piece.at(t)) * piece.dz(t);
    k += gk::wk[i] * v;
    if (i % 2 == 1) g += gk::wg[i / 2] * v;
  }
  kronrod = hw * k;
  err = std::abs(hw * (k - g));
}

struct QuadOptions {
  int max_panels = 4000;
};

// Adaptive contour integral with estimated absolute error <= tol.
template <class F>
Cplx integrate_along_path(F&& f, const PathSpec& path, double tol,
                          QuadOptions opt = {}) {
  struct Panel {
    double err;
    std::size_t piece;
    double t0, t1;
    Cplx val;
    bool operator<(const Panel& o) const {
      if (err != o.err) return err < o.err;
      if (piece != o.piece) return piece > o.piece;  // deterministic tie-break
      return t0 > o.t0;
    }
  };
  auto pieces = path.pieces();
  std::priority_queue<Panel> queue;
  double total_err = 0;
  int panels = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Panel p{0, i, 0.0, 1.0, {}};
    gk15_piece(f, pieces[i], p.t0, p.t1, p.val, p.err);
    total_err += p.err;
    queue.push(p);
    ++panels;
  }
  while (total_err > tol && panels < opt.max_panels) {
    Panel worst = queue.top();
    queue.pop();
    total_err -= worst.err;
    double tm = 0.5 * (worst.t0 + worst.t1);
    for (auto [a, b] : {std::pair{worst.t0, tm}, std::pair{tm, worst.t1}}) {
      Panel p{0, worst.piece, a, b, {}};
      gk15_piece(f, pieces[worst.piece], a, b, p.val, p.err);
      total_err += p.err;
      queue.push(p);
    }
    ++panels;
  }
  if (total_err > tol)
    throw NumericsError("quadrature did not converge after max subdivisions");
  // Sum panels in a deterministic (piece, t0) order with compensation.
  std::vector<Panel> all;
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) {
    if (a.piece != b.piece) return a.piece < b.piece;
    return a.t0 < b.t0;
  });
  CompensatedSum re, im;
  for (const auto& p : all) {
    re += p.val.real();
    im += p.val.imag();
  }
  return {re.value(), im.value()};
}

// Real-axis adaptive integral of a real-valued integrand.
template <class F>
double integrate_real(F&& f, double a, double b, double tol, QuadOptions opt = {}) {
  Polyline line{{Cplx(a), Cplx(b)}};
  Cplx v = integrate_along_path([&](Cplx z) { return Cplx(f(z.real())); },
                                PathSpec(line), tol, opt);
  return v.real();
}

}  // namespace bltk::contour
