#include "doctest.h"

#include "bltk/expr.hpp"
#include "oracle_utils.hpp"

using namespace bltk;

TEST_SUITE("expr") {

TEST_CASE("parse builds the expected tree shapes") {
  Expr e = parse("z^2 + 1");
  REQUIRE(e.get()->kind == NodeKind::Add);
  CHECK(e.get()->a->kind == NodeKind::Pow);
  CHECK(e.get()->a->a->kind == NodeKind::Var);
  CHECK(e.get()->b->kind == NodeKind::Literal);
  CHECK(e.get()->b->literal == 1.0);

  Expr e2 = parse("exp(2*pi*i*z^2)*sin(pi*z)/pi");
  CHECK(e2.get()->kind == NodeKind::Div);
  CHECK(serialize(e2) == "exp(2*pi*i*z^2)*sin(pi*z)/pi");
}

TEST_CASE("syntax errors carry byte offsets") {
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("sin(");
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
  try {
    parse("2*foo(3)");
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  CHECK_THROWS_AS(parse("1 + "), ParseError);
  CHECK_THROWS_AS(parse("(z"), ParseError);
  CHECK_THROWS_AS(parse("z 2"), ParseError);
}

TEST_CASE("precedence and associativity") {
  auto val = [](const char* s, Cplx z = 0.0) { return eval_jet(parse(s), z, 0).value(); };
  CHECK(val("-z^2", 2.0) == Cplx(-4.0));          // ^ binds before unary -
  CHECK(val("2^3^2") == Cplx(512.0));             // right-associative
  CHECK(val("z^-2", 2.0) == Cplx(0.25));
  CHECK(val("1 - 2 - 3") == Cplx(-4.0));
  CHECK(val("2 + 3*4") == Cplx(14.0));
  CHECK(std::abs(val("e^2") - std::exp(Cplx(2.0))) < 1e-14);
  CHECK(std::abs(val("2*pi*i") - Cplx(0, 6.283185307179586)) < 1e-15);
}

TEST_CASE("round trip: parse(serialize(e)) is structurally identical") {
  const char* gallery[] = {
      "z^2 + 1",
      "exp(2*pi*i*z^2)*sin(pi*z)/pi",
      "-(1 + exp(-2*z))/4",
      "exp(2*z) + 1/2",
      "-exp(2*z) - exp(z)",
      "(2*z + 1)/(z - 3)",
      "sin(z)*cos(z) - tan(z/2)^3",
      "sqrt(z^2 + 1)/log(z + 2)",
      "(1 - exp(-z))/z",
  };
  for (const char* s : gallery) {
    Expr e = parse(s);
    CHECK(structurally_equal(e, parse(serialize(e))));
  }
  oracle::ExprGen gen(123);
  for (int i = 0; i < 40; ++i) {
    auto [e, z] = gen.next();
    CHECK(structurally_equal(e, parse(serialize(e))));
  }
}

TEST_CASE("jets of simple functions") {
  Jet j = eval_jet(parse("z^2"), Cplx(1, 1), 3);
  CHECK(std::abs(j.d[0] - Cplx(0, 2)) < 1e-15);
  CHECK(std::abs(j.d[1] - Cplx(2, 2)) < 1e-15);
  CHECK(std::abs(j.d[2] - Cplx(2, 0)) < 1e-15);
  CHECK(std::abs(j.d[3]) < 1e-15);

  Jet ex = eval_jet(parse("exp(z)"), 0.0, 3);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(ex.d[k] - 1.0) < 1e-15);

  // derivative of the quadratic-phase product at z = 1 has modulus 1
  Jet e2 = eval_jet(parse("exp(2*pi*i*z^2)*sin(pi*z)/pi"), 1.0, 1);
  CHECK(std::abs(e2.d[0]) < 1e-14);
  CHECK(std::abs(std::abs(e2.d[1]) - 1.0) < 1e-13);
  CHECK(std::abs(e2.d[1] - Cplx(-1.0)) < 1e-13);  // value is exactly -1 here
}

TEST_CASE("domain errors at poles and cuts") {
  CHECK_THROWS_AS(eval_jet(parse("1/z"), 0.0, 0), DomainError);
  CHECK_THROWS_AS(eval_jet(parse("log(z)"), 0.0, 0), DomainError);
  CHECK_THROWS_AS(eval_jet(parse("log(z)"), Cplx(-1.0, 0.0), 0), DomainError);
  CHECK_THROWS_AS(eval_jet(parse("sqrt(z)"), Cplx(-2.0, 0.0), 0), DomainError);
  CHECK_THROWS_AS(eval_jet(parse("tan(z)"), Cplx(1.5707963267948966, 0.0), 1), DomainError);
  // just off the cut the principal branch applies
  CHECK(std::abs(eval_jet(parse("sqrt(z)"), Cplx(-1.0, 1e-12), 0).value().imag() - 1.0) <
        1e-9);
}

TEST_CASE("integer powers avoid the cut; fractional powers use it") {
  // (-2)^2 must not go through exp(2 log(-2))
  CHECK(eval_jet(parse("z^2"), Cplx(-2.0, 0.0), 0).value() == Cplx(4.0));
  CHECK(std::abs(eval_jet(parse("z^(1/2)"), 4.0, 0).value() - 2.0) < 1e-14);
  CHECK_THROWS_AS(eval_jet(parse("z^(1/2)"), Cplx(-4.0, 0.0), 0), DomainError);
}

TEST_CASE("jet derivatives agree with central finite differences at 200 seeded points") {
  oracle::ExprGen gen(987654);
  double worst1 = 0, worst2 = 0, worst3 = 0;
  for (int i = 0; i < 200; ++i) {
    auto [e, z] = gen.next();
    Jet j = eval_jet(e, z, 3);
    auto f = [&](Cplx w) { return eval_jet(e, w, 0).value(); };
    double e1 = std::abs(oracle::fd1(f, z) - j.d[1]) / (1.0 + std::abs(j.d[1]));
    double e2 = std::abs(oracle::fd2(f, z) - j.d[2]) / (1.0 + std::abs(j.d[2]));
    double e3 = std::abs(oracle::fd3(f, z) - j.d[3]) / (1.0 + std::abs(j.d[3]));
    worst1 = std::max(worst1, e1);
    worst2 = std::max(worst2, e2);
    worst3 = std::max(worst3, e3);
  }
  CHECK(worst1 <= 1e-6);
  CHECK(worst2 <= 1e-6);
  CHECK(worst3 <= 1e-6);
}

TEST_CASE("jet order is respected") {
  CHECK_THROWS_AS(eval_jet(parse("z"), 0.0, 4), PreconditionError);
  CHECK_THROWS_AS(eval_jet(parse("z"), 0.0, -1), PreconditionError);
  Jet j = eval_jet(parse("sin(z)"), 0.3, 1);
  CHECK(j.order == 1);
}

}  // TEST_SUITE
