#pragma once

// Oriented piecewise-smooth paths in the complex plane. Every path is
// exposed as a list of smooth pieces, each parametrized over [0,1].

#include <cmath>
#include <variant>
#include <vector>

#include "bltk/errors.hpp"

namespace bltk::contour {

struct Polyline {
  std::vector<Cplx> points;
};
struct RaySegment {
  double theta = 0.0;  // direction arg z
  double t0 = 0.0, t1 = 1.0;  // radii, may run inward or outward
};
struct CircleArc {
  Cplx center{};
  double radius = 1.0;
  double arg0 = 0.0, arg1 = 2.0 * 3.141592653589793238462643383279502884;
};
struct Sampled {
  std::vector<Cplx> points;  // traced curve, consumed as a polyline
};

struct Piece {
  enum Kind { Line, Arc } kind = Line;
  Cplx a{}, b{};   // Line endpoints
  Cplx center{};   // Arc data
  double radius = 0.0, arg0 = 0.0, arg1 = 0.0;

  Cplx at(double t) const {
    if (kind == Line) return a + t * (b - a);
    return center + std::polar(radius, arg0 + t * (arg1 - arg0));
  }
  Cplx dz(double t) const {
    if (kind == Line) return b - a;
    double phi = arg0 + t * (arg1 - arg0);
    return Cplx(0, 1) * (arg1 - arg0) * std::polar(radius, phi);
  }
  double length() const {
    if (kind == Line) return std::abs(b - a);
    return radius * std::fabs(arg1 - arg0);
  }
};

class PathSpec {
 public:
  using Variant = std::variant<Polyline, RaySegment, CircleArc, Sampled>;

  PathSpec(Polyline p) : v_(std::move(p)) { validate(); }
  PathSpec(RaySegment p) : v_(p) { validate(); }
  PathSpec(CircleArc p) : v_(p) { validate(); }
  PathSpec(Sampled p) : v_(std::move(p)) { validate(); }

  static PathSpec segment(Cplx a, Cplx b) { return PathSpec(Polyline{{a, b}}); }
  static PathSpec circle(Cplx center, double radius) {
    return PathSpec(CircleArc{center, radius, 0.0,
                              2.0 * 3.141592653589793238462643383279502884});
  }

  const Variant& raw() const { return v_; }

  std::vector<Piece> pieces() const {
    std::vector<Piece> out;
    if (auto* p = std::get_if<Polyline>(&v_)) {
      for (std::size_t i = 0; i + 1 < p->points.size(); ++i)
        out.push_back({Piece::Line, p->points[i], p->points[i + 1], {}, 0, 0, 0});
    } else if (auto* r = std::get_if<RaySegment>(&v_)) {
      Cplx dir = std::polar(1.0, r->theta);
      out.push_back({Piece::Line, dir * r->t0, dir * r->t1, {}, 0, 0, 0});
    } else if (auto* c = std::get_if<CircleArc>(&v_)) {
      out.push_back({Piece::Arc, {}, {}, c->center, c->radius, c->arg0, c->arg1});
    } else if (auto* s = std::get_if<Sampled>(&v_)) {
      for (std::size_t i = 0; i + 1 < s->points.size(); ++i)
        out.push_back({Piece::Line, s->points[i], s->points[i + 1], {}, 0, 0, 0});
    }
    return out;
  }

  double total_length() const {
    double L = 0;
    for (const auto& p : pieces()) L += p.length();
    return L;
  }

  Cplx start() const { return pieces().front().at(0.0); }
  Cplx end() const { return pieces().back().at(1.0); }

  PathSpec reversed() const {
    if (auto* p = std::get_if<Polyline>(&v_)) {
      Polyline q = *p;
      std::reverse(q.points.begin(), q.points.end());
      return PathSpec(q);
    }
    if (auto* r = std::get_if<RaySegment>(&v_)) return PathSpec(RaySegment{r->theta, r->t1, r->t0});
    if (auto* c = std::get_if<CircleArc>(&v_))
      return PathSpec(CircleArc{c->center, c->radius, c->arg1, c->arg0});
    Sampled q = std::get<Sampled>(v_);
    std::reverse(q.points.begin(), q.points.end());
    return PathSpec(q);
  }

 private:
  void validate() const {
    if (auto* p = std::get_if<Polyline>(&v_)) {
      if (p->points.size() < 2) throw PreconditionError("polyline needs at least 2 points");
    } else if (auto* r = std::get_if<RaySegment>(&v_)) {
      if (r->t0 == r->t1) throw PreconditionError("ray segment has zero length");
    } else if (auto* c = std::get_if<CircleArc>(&v_)) {
      if (!(c->radius > 0)) throw PreconditionError("arc radius must be positive");
      if (c->arg0 == c->arg1) throw PreconditionError("arc has zero length");
    } else if (auto* s = std::get_if<Sampled>(&v_)) {
      if (s->points.size() < 2) throw PreconditionError("sampled path needs at least 2 points");
    }
    if (!(total_length() > 0)) throw PreconditionError("path has zero length");
  }

  Variant v_;
};

}  // namespace bltk::contour
