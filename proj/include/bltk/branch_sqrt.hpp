#pragma once

// A continuous branch of sqrt(A) along a path. The branch is pinned at
// the path start as initial_sign * principal sqrt and continued by
// nearest-root selection; the anchor walk halves its step whenever the
// branch would rotate by more than pi/4 between anchors.

#include <cmath>
#include <vector>

#include "bltk/expr.hpp"
#include "bltk/quadrature.hpp"
#include "bltk/path.hpp"

namespace bltk::contour {

class BranchSqrt {
 public:
  BranchSqrt(JetFn A, const PathSpec& path, int initial_sign, double min_abs = 1e-12)
      : A_(std::move(A)), pieces_(path.pieces()), min_abs_(min_abs) {
    double s0 = 0.0;
    Cplx z0 = pieces_.front().at(0.0);
    Cplx w = root_at(z0);
    if (initial_sign < 0) w = -w;
    anchors_.push_back({s0, 0, 0.0, w});
    for (std::size_t pi = 0; pi < pieces_.size(); ++pi) {
      walk_piece(pi, s0);
      s0 += pieces_[pi].length();
    }
  }

  // Branch value at parameter t of piece `pi`, aligned to the nearest
  // anchor at or before that point.
  Cplx at(std::size_t pi, double t) const {
    Cplx w = root_at(pieces_[pi].at(t));
    const Anchor& ref = anchor_before(pi, t);
    return align(w, ref.w);
  }

  Cplx terminal() const { return anchors_.back().w; }
  Cplx initial() const { return anchors_.front().w; }
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  struct Anchor {
    double s;
    std::size_t piece;
    double t;
    Cplx w;
  };

  Cplx root_at(Cplx z) const {
    Cplx a = A_(z);
    if (std::abs(a) < min_abs_)
      throw DomainError("zero of A on path (branch of sqrt ambiguous)", z);
    return std::sqrt(a);
  }

  static Cplx align(Cplx w, Cplx ref) {
    return (std::abs(w - ref) <= std::abs(w + ref)) ? w : -w;
  }

  void walk_piece(std::size_t pi, double s_base) {
    const Piece& piece = pieces_[pi];
    const double len = piece.length();
    double t = 0.0;
    double dt = 1.0 / 16.0;
    Cplx wprev = anchors_.back().w;
    while (t < 1.0) {
      if (dt > 1.0 - t) dt = 1.0 - t;
      Cplx w = align(root_at(piece.at(t + dt)), wprev);
      // rotation between consecutive anchors must stay below pi/4
      double cosang = (w * std::conj(wprev)).real() / (std::abs(w) * std::abs(wprev));
      if (cosang < 0.70710678118654752 && dt > 1e-12) {
        dt *= 0.5;
        continue;
      }
      t += dt;
      wprev = w;
      anchors_.push_back({s_base + t * len, pi, t, w});
      if (cosang > 0.996) dt *= 2.0;  // relax when the branch turns slowly
    }
  }

  const Anchor& anchor_before(std::size_t pi, double t) const {
    // anchors are ordered by (piece, t); binary search the last one <= query
    std::size_t lo = 0, hi = anchors_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      const Anchor& a = anchors_[mid];
      if (a.piece < pi || (a.piece == pi && a.t <= t))
        lo = mid;
      else
        hi = mid;
    }
    return anchors_[lo];
  }

  JetFn A_;
  std::vector<Piece> pieces_;
  double min_abs_;
  std::vector<Anchor> anchors_;
};

// Continuous-branch contour integral \int sqrt(A) dz along the path.
// Panels refine until each carries its share of the error budget; branch
// values inside a panel align against the anchor chain, which is denser
// than any panel can get, so nodes cannot flip sheets.
inline Cplx integrate_branch_sqrt(const BranchSqrt& b, double tol) {
  Cplx total{};
  const auto& pieces = b.pieces();
  for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
    struct Span {
      double a, b;
    };
    const double budget = tol / static_cast<double>(pieces.size());
    std::vector<Span> work{{0.0, 1.0}};
    std::vector<std::pair<double, Cplx>> accepted;
    int panels = 0;
    while (!work.empty()) {
      Span s = work.back();
      work.pop_back();
      if (++panels > 20000) throw NumericsError("branch-sqrt quadrature did not converge");
      const double hw = 0.5 * (s.b - s.a), mid = 0.5 * (s.a + s.b);
      Cplx k{}, g{};
      for (int i = 0; i < 15; ++i) {
        double t = mid + hw * gk::xk[i];
        Cplx v = b.at(pi, t) * pieces[pi].dz(t);
        k += gk::wk[i] * v;
        if (i % 2 == 1) g += gk::wg[i / 2] * v;
      }
      Cplx val = hw * k;
      double err = std::abs(hw * (k - g));
      if (err > budget * (s.b - s.a) && (s.b - s.a) > 1e-10) {
        work.push_back({s.a, mid});
        work.push_back({mid, s.b});
      } else {
        accepted.emplace_back(s.a, val);
      }
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& p : accepted) total += p.second;
  }
  return total;
}

}  // namespace bltk::contour
