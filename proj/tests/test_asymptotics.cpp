#include "doctest.h"

#include "bltk/asymptotics.hpp"

using namespace bltk;
using namespace bltk::asym;

TEST_SUITE("asymptotics") {

TEST_CASE("critical rays of polynomial coefficients") {
  auto r1 = critical_rays({0.0, 1.0});  // A = z
  REQUIRE(r1.size() == 3);
  const double pi = 3.141592653589793238462643383279502884;
  CHECK(r1[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r1[1] == doctest::Approx(2 * pi / 3).epsilon(1e-14));
  CHECK(r1[2] == doctest::Approx(4 * pi / 3).epsilon(1e-14));

  auto r2 = critical_rays({0.0, 0.0, -4.0});  // A = -4 z^2
  REQUIRE(r2.size() == 4);
  CHECK(r2[0] == doctest::Approx(pi / 4));
  CHECK(r2[1] == doctest::Approx(3 * pi / 4));
  CHECK(r2[2] == doctest::Approx(5 * pi / 4));
  CHECK(r2[3] == doctest::Approx(7 * pi / 4));

  auto r3 = critical_rays({0.0, Cplx(0, 1)});  // A = i z: arg a_n = pi/2
  REQUIRE(r3.size() == 3);
  for (double th : r3)
    CHECK(std::abs(std::remainder(3 * th + pi / 2, 2 * pi)) < 1e-12);

  CHECK_THROWS_AS(critical_rays({5.0}), PreconditionError);
  CHECK_THROWS_AS(critical_rays({}), PreconditionError);
}

TEST_CASE("verify_decay: quadratic coefficient decays like x^-1/2") {
  auto tr = trace_decay_path(JetFn(parse("z^2")), 1.0, 400.0, 1e-10);
  auto rep = verify_decay(JetFn(parse("z^2")), tr.path, 0, 1e-10);
  CHECK(rep.model == DecayModel::PowerLaw);
  CHECK(rep.fitted_rate == doctest::Approx(-0.5).epsilon(0.3));
  CHECK(rep.verdict);
}

TEST_CASE("liouville map on closed-form examples") {
  CHECK(std::abs(liouville_map(JetFn(parse("z")), 1.0,
                               contour::PathSpec::segment(1.0, 4.0)) -
                 Cplx(14.0 / 3.0)) < 1e-9);
  double x = 2.0;
  CHECK(std::abs(liouville_map(JetFn(parse("exp(z)")), 0.0,
                               contour::PathSpec::segment(0.0, x)) -
                 Cplx(2 * (std::exp(x / 2) - 1))) < 1e-9);
  CHECK(std::abs(liouville_map(JetFn(parse("1")), 0.0,
                               contour::PathSpec::segment(0.0, Cplx(0, 1))) -
                 Cplx(0, 1)) < 1e-12);
  CHECK_THROWS_AS(liouville_map(JetFn(parse("z")), 5.0,
                                contour::PathSpec::segment(1.0, 4.0)),
                  PreconditionError);
}

TEST_CASE("trace: A = z runs along the positive real axis") {
  auto res = trace_decay_path(JetFn(parse("z")), 1.0, 60.0, 1e-10);
  auto& pts = std::get<contour::Sampled>(res.path.raw()).points;
  REQUIRE(pts.size() >= 3);
  double prev = 0.0;
  for (const auto& z : pts) {
    CHECK(std::abs(z.imag()) <= 1e-8);
    CHECK(z.real() >= prev - 1e-12);
    prev = z.real();
  }
  // s = (2/3)(x^{3/2} - 1) => x(60) = (90 + 1)^{2/3}
  CHECK(pts.back().real() == doctest::Approx(std::pow(91.0, 2.0 / 3.0)).epsilon(1e-6));

  // the realized path has Im Z constant: re-integrate sqrt(A) over it
  Cplx Z = liouville_map(JetFn(parse("z")), 1.0, res.path);
  CHECK(std::abs(Z.imag()) <= 1e-6 * 60.0);
  CHECK(Z.real() == doctest::Approx(60.0).epsilon(1e-6));
  CHECK(res.im_z_drift <= 1e-6 * 60.0);
}

TEST_CASE("trace: A = e^z and A = 1") {
  auto res = trace_decay_path(JetFn(parse("exp(z)")), 1.0, 500.0, 1e-10);
  auto& pts = std::get<contour::Sampled>(res.path.raw()).points;
  for (const auto& z : pts) CHECK(std::abs(z.imag()) <= 1e-8);
  // s = 2(e^{x/2} - e^{1/2}) => x(500) = 2 log(250 + e^{1/2})
  CHECK(pts.back().real() ==
        doctest::Approx(2 * std::log(250.0 + std::exp(0.5))).epsilon(1e-6));

  auto flat = trace_decay_path(JetFn(parse("1")), 0.0, 5.0, 1e-10);
  auto& fp = std::get<contour::Sampled>(flat.path.raw()).points;
  CHECK(std::abs(fp.back() - 5.0) < 1e-8);
}

TEST_CASE("trace from a non-principal critical ray stays on the ray") {
  const double pi = 3.141592653589793238462643383279502884;
  Cplx start = std::polar(1.0, 2 * pi / 3);
  auto res = trace_decay_path(JetFn(parse("z")), start, 60.0, 1e-10);
  auto& pts = std::get<contour::Sampled>(res.path.raw()).points;
  for (const auto& z : pts) {
    if (std::abs(z) < 2.0) continue;
    double d = std::fabs(std::arg(z) - 2 * pi / 3);
    CHECK(d <= 0.1);
  }
  CHECK(std::abs(pts.back()) > 10.0);
}

TEST_CASE("trace aborts cleanly at a zero of A") {
  // A = 1 - z has a zero at 1; tracing from 0 runs straight into it
  auto res = trace_decay_path(JetFn(parse("1 - z")), 0.0, 10.0, 1e-10);
  CHECK(res.truncated);
  CHECK(std::abs(res.stop_point - 1.0) < 0.2);
}

TEST_CASE("verify_decay: Airy-type coefficient, envelope falls like x^-1/4") {
  auto tr = trace_decay_path(JetFn(parse("z")), 1.0, 234.0, 1e-10);  // to |z| ~ 50
  auto rep = verify_decay(JetFn(parse("z")), tr.path, 0, 1e-10);
  CHECK(rep.model == DecayModel::PowerLaw);
  CHECK(rep.verdict);
  CHECK(rep.wronskian_drift <= 1e-8);
  CHECK(rep.fitted_rate == doctest::Approx(-0.25).epsilon(0.35));
  double lo = 1e300, hi = 0;
  for (const auto& s : rep.samples) {
    double x = std::abs(s.z);
    if (x < 25.0 || x > 50.0) continue;
    double v = s.env * std::pow(x, 0.25);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 3.0);
}

TEST_CASE("verify_decay: constant coefficient has rate 0") {
  auto rep = verify_decay(JetFn(parse("1")), contour::PathSpec::segment(0.0, 100.0), 0, 1e-10);
  CHECK(rep.model == DecayModel::PowerLaw);
  CHECK(std::fabs(rep.fitted_rate) <= 0.02);
}

TEST_CASE("verify_decay: exponential coefficient decays at rate -1/4") {
  auto rep = verify_decay(JetFn(parse("exp(z)")),
                          contour::PathSpec::segment(10.0, 20.0), 0, 1e-8);
  CHECK(rep.model == DecayModel::Exponential);
  CHECK(rep.fitted_rate == doctest::Approx(-0.25).epsilon(0.2));
  CHECK(rep.wronskian_drift <= 1e-8);
  CHECK(rep.verdict);
}

TEST_CASE("verify_decay: the basis envelope controls random initial conditions") {
  auto rep = verify_decay(JetFn(parse("z")), contour::PathSpec::segment(1.0, 40.0), 8, 1e-10);
  const double bound = 2.0 * std::sqrt(2.0);
  for (const auto& s : rep.samples) {
    if (s.s < 1.0) continue;  // skip the start where an IC can vanish
    CHECK(s.env <= bound * s.env_basis + 1e-12);
  }
}

TEST_CASE("tail integrals") {
  auto t1 = tail_integral(JetFn(parse("exp(-z)")), 0.0, 3.0, 60.0);
  CHECK(std::fabs(t1.value - 0.19914827347118852) <= 1e-6);
  auto t0 = tail_integral(JetFn(parse("0")), 0.0, 1.0, 10.0);
  CHECK(t0.value == 0.0);
  auto tl = tail_integral(JetFn(parse("1")), 0.0, 1.0, 3.0);
  CHECK(tl.value == doctest::Approx(4.0).epsilon(1e-10));
  CHECK_THROWS_AS(tail_integral(JetFn(parse("1")), 0.0, 3.0, 2.0), PreconditionError);
}

TEST_CASE("picard: A = 0 fixes u = 1 immediately") {
  auto sol = picard_ray_solution(JetFn(parse("0")), 0.0, 1.0, {1.0, 2.0, 3.0}, 1e-12);
  CHECK(sol.iterations == 1);
  for (Cplx u : sol.u_values) CHECK(std::abs(u - 1.0) < 1e-14);
  // v = u (X + int u^-2) = x exactly
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i)
    CHECK(std::abs(sol.v_values[i] - sol.x_grid[i]) < 1e-9);
}

TEST_CASE("picard: decaying exponential coefficient") {
  std::vector<double> grid;
  for (double x = 3.0; x <= 40.0 + 1e-9; x += 0.5) grid.push_back(x);
  auto sol = picard_ray_solution(JetFn(parse("exp(-z)")), 0.0, 3.0, grid, 1e-12);
  CHECK(sol.contraction_bound == doctest::Approx(0.19914827).epsilon(1e-4));
  CHECK(sol.contraction_bound < 0.5);
  CHECK(std::abs(sol.u_values.back() - 1.0) <= 1e-5);
  CHECK(sol.residual <= 1e-6);
  CHECK(sol.observed_ratio <= 0.21);
  CHECK(sol.observed_ratio <= sol.contraction_bound + 0.05);
  CHECK(std::abs(sol.v_values.back() / 40.0 - 1.0) <= 0.05);
  // u(3) = 1 - e^{-3} + e^{-6}/4 - ... from the closed-form expansion
  CHECK(std::abs(sol.u_values.front() - (1.0 - std::exp(-3.0) + std::exp(-6.0) / 4.0)) <
        1e-3);
}

TEST_CASE("picard: contraction precondition is enforced") {
  CHECK_THROWS_AS(
      picard_ray_solution(JetFn(parse("1")), 0.0, 1.0, {1.0, 2.0}, 1e-10),
      PreconditionError);
}

}  // TEST_SUITE
