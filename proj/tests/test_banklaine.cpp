#include "doctest.h"

#include <random>

#include "bltk/banklaine.hpp"

using namespace bltk;
using namespace bltk::banklaine;

namespace {

// Jets of a Moebius transform (a U + b)/(c U + d) of a jet U.
Jet moebius_of(const Jet& U, Cplx a, Cplx b, Cplx c, Cplx d) {
  return (a * U + b) / (c * U + d);
}

std::vector<Cplx> points_in_disc(unsigned seed, int n, double r) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1, 1);
  std::vector<Cplx> out;
  while (static_cast<int>(out.size()) < n) {
    Cplx z(r * uni(rng), r * uni(rng));
    if (std::abs(z) <= r) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_SUITE("banklaine") {

TEST_CASE("coefficient extraction: e^z gives -(1 + e^-2z)/4") {
  JetFn E(parse("exp(z)"));
  CHECK(std::abs(coefficient_from_product(E.jet(0.0, 2)) - Cplx(-0.5)) < 1e-14);
  JetFn A(parse("-(1 + exp(-2*z))/4"));
  for (Cplx z : points_in_disc(31, 40, 4.0)) {
    Cplx got = coefficient_from_product(E.jet(z, 2));
    CHECK(std::abs(got - A(z)) <= 1e-10 * (1.0 + std::abs(A(z))));
  }
}

TEST_CASE("coefficient extraction: exponential-plus-constant families") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int trial = 0; trial < 6; ++trial) {
    Cplx a(uni(rng) + 1.5, uni(rng));
    Cplx b(uni(rng), uni(rng));
    double sign = trial % 2 == 0 ? 1.0 : -1.0;
    Cplx c = sign / a;  // a c = +-1
    JetFn E([a, b, c](Cplx z, int order) {
      return jet_exp(Jet::variable(z, order) * a + b) + c;
    });
    Cplx expect = -a * a / 4.0;
    for (Cplx z : points_in_disc(100 + trial, 10, 2.0)) {
      Jet e = E.jet(z, 2);
      if (std::abs(e.value()) < 1e-3) continue;
      CHECK(std::abs(coefficient_from_product(e) - expect) <= 1e-10 * (1 + std::abs(expect)));
    }
  }
}

TEST_CASE("coefficient extraction: sin z gives 1/4") {
  JetFn E(parse("sin(z)"));
  for (Cplx z : points_in_disc(32, 30, 3.0)) {
    if (std::abs(E(z)) < 1e-3) continue;
    CHECK(std::abs(coefficient_from_product(E.jet(z, 2)) - Cplx(0.25)) < 1e-10);
  }
  CHECK_THROWS_AS(coefficient_from_product(E.jet(0.0, 2)), DomainError);
}

TEST_CASE("schwarzian of a Moebius map vanishes") {
  JetFn U(parse("(2*z + 1)/(z - 3)"));
  for (Cplx z : points_in_disc(33, 10, 2.0)) {
    if (std::abs(z - 3.0) < 0.5) continue;
    CHECK(std::abs(schwarzian(U.jet(z, 3))) < 1e-10);
  }
}

TEST_CASE("schwarzian flags critical points") {
  // U = z^2 has U'(0) = 0
  JetFn U(parse("z^2"));
  CHECK_THROWS_AS(schwarzian(U.jet(0.0, 3)), DomainError);
  CHECK_THROWS_AS(schwarzian(U.jet(0.3, 2)), PreconditionError);  // order too low
}

TEST_CASE("schwarzian of e^{az} is -a^2/2") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 5; ++t) {
    Cplx a(uni(rng) + 1.2, uni(rng));
    JetFn U([a](Cplx z, int order) { return jet_exp(Jet::variable(z, order) * a); });
    for (Cplx z : points_in_disc(200 + t, 8, 2.0))
      CHECK(std::abs(schwarzian(U.jet(z, 3)) + a * a / 2.0) < 1e-9 * (1 + std::abs(a * a)));
  }
}

TEST_CASE("schwarzian of tan z is 2") {
  JetFn U(parse("tan(z)"));
  for (Cplx z : points_in_disc(34, 20, 1.2)) {
    if (std::abs(std::cos(z)) < 0.2) continue;
    CHECK(std::abs(schwarzian(U.jet(z, 3)) - 2.0) < 1e-9);
  }
}

TEST_CASE("schwarzian is Moebius invariant") {
  JetFn U(parse("tan(z)"));
  std::mt19937 rng(66);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 8; ++t) {
    Cplx a(uni(rng), uni(rng)), b(uni(rng), uni(rng)), c(uni(rng), uni(rng)),
        d(uni(rng), uni(rng));
    if (std::abs(a * d - b * c) < 0.2) continue;
    for (Cplx z : points_in_disc(300 + t, 6, 1.0)) {
      if (std::abs(std::cos(z)) < 0.3) continue;
      Jet u = U.jet(z, 3);
      if (std::abs(c * u.value() + d) < 0.2) continue;
      Cplx s1 = schwarzian(u);
      Cplx s2 = schwarzian(moebius_of(u, a, b, c, d));
      CHECK(std::abs(s1 - s2) <= 1e-8 * (1.0 + std::abs(s1)));
    }
  }
}

TEST_CASE("coefficient from U/U' agrees with half the Schwarzian") {
  // for U = e^{az}: E = U/U' is constant 1/a and A = -a^2/4 = S(U)/2
  std::mt19937 rng(88);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 5; ++t) {
    Cplx a(uni(rng) + 1.1, uni(rng));
    JetFn U([a](Cplx z, int order) { return jet_exp(Jet::variable(z, order) * a); });
    for (Cplx z : points_in_disc(400 + t, 6, 1.5)) {
      Jet u = U.jet(z, 3);
      Jet up = jet_derivative(u);
      Jet Ejet = Jet{{u.value(), u.d1(), u.d2(), 0.0}, 2} / up;
      Cplx A1 = coefficient_from_product(Ejet);
      Cplx A2 = schwarzian(u) / 2.0;
      CHECK(std::abs(A1 - A2) <= 1e-8 * (1.0 + std::abs(A2)));
    }
  }
}

TEST_CASE("special form B = (E'-1)/E") {
  JetFn E1(parse("exp(z) - 1"));
  for (Cplx z : points_in_disc(35, 20, 3.0)) {
    if (std::abs(E1(z)) < 1e-3) continue;
    CHECK(std::abs(special_b(E1.jet(z, 1)) - Cplx(1.0)) < 1e-12);
  }
  JetFn E2(parse("z*exp(z)"));
  const double e = 2.718281828459045;
  CHECK(std::abs(special_b(E2.jet(1.0, 1)) - Cplx((2 * e - 1) / e)) < 1e-13);
  CHECK_THROWS_AS(special_b(E1.jet(0.0, 1)), DomainError);
}

TEST_CASE("third-order residual separates matched and mismatched pairs") {
  JetFn E(parse("exp(z)"));
  JetFn A(parse("-(1 + exp(-2*z))/4"));
  for (Cplx z : points_in_disc(36, 20, 3.0))
    CHECK(third_order_residual(E, A, z) <= 1e-9 * (1 + std::abs(std::exp(z))));
  JetFn As(parse("1/4"));
  CHECK(third_order_residual(JetFn(parse("sin(z)")), As, 0.7) <= 1e-12);
  JetFn zero(parse("0"));
  CHECK(third_order_residual(E, zero, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("verify: quadratic-phase product passes with parity signs") {
  auto rep = verify_bank_laine(parse("exp(2*pi*i*z^2)*sin(pi*z)/pi"), 0.0, 3.5, 1e-8);
  CHECK(rep.is_bank_laine);
  REQUIRE(rep.zeros.size() == 7);
  for (const auto& z : rep.zeros) {
    long k = std::lround(z.location.real());
    CHECK(z.sign == ((k % 2 == 0) ? 1 : -1));
  }
  CHECK(rep.max_sign_error <= 1e-8);
}

TEST_CASE("verify: sin z passes with alternating signs") {
  auto rep = verify_bank_laine(parse("sin(z)"), 0.0, 7.0, 1e-9);
  CHECK(rep.is_bank_laine);
  REQUIRE(rep.zeros.size() == 5);
  for (std::size_t i = 0; i + 1 < rep.zeros.size(); ++i)
    CHECK(rep.zeros[i].sign * rep.zeros[i + 1].sign == -1);
  CHECK(!rep.is_special);
}

TEST_CASE("verify: a multiple zero is rejected") {
  auto rep = verify_bank_laine(parse("z^2"), 0.0, 1.0, 1e-9);
  CHECK(!rep.is_bank_laine);
  CHECK(rep.failure.find("multiple zero") != std::string::npos);
}

TEST_CASE("verify: e^z + 1 has sign -1 zeros (not special)") {
  auto rep = verify_bank_laine(parse("exp(z) + 1"), 0.0, 7.0, 1e-9);
  CHECK(rep.is_bank_laine);
  CHECK(!rep.is_special);
  REQUIRE(rep.zeros.size() == 2);
  for (const auto& z : rep.zeros) CHECK(z.sign == -1);
}

TEST_CASE("verify: e^z - 1 is special") {
  auto rep = verify_bank_laine(parse("exp(z) - 1"), 0.0, 7.0, 1e-9);
  CHECK(rep.is_bank_laine);
  CHECK(rep.is_special);
  REQUIRE(rep.zeros.size() == 3);
}

}  // TEST_SUITE
