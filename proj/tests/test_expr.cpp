#include <cmath>
#include <string>
#include <vector>

#include "crosswidth/expr.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

const std::vector<std::string> kSamples = {
    "x^2 - 2*x",
    "4*tanh(x)",
    "x^2 - 2*x + 4*x^3",
    "exp(-x^2/2)*(1 + x/3)",
    "1/(2 + x^2)",
    "x^(-2) + 3",
    "-(x - 1)^3",
    "2 - (3 - x)",
    "x/(2/x)",
    "blend((x - 3.2)/0.0125)*(3.6 - x^2) + x^2",
    "0.1*x^5 - 1e-3*x",
};

double fd(const Expr& e, double x, double d = 1e-4) {
  return (-e(x + 2 * d) + 8 * e(x + d) - 8 * e(x - d) + e(x - 2 * d)) / (12 * d);
}

}  // namespace

TEST_CASE("parse and evaluate") {
  CHECK(parse_expr("x^2 - 2*x")(3.0) == doctest::Approx(3.0));
  CHECK(parse_expr("4*tanh(x)")(0.5) == doctest::Approx(4 * std::tanh(0.5)));
  CHECK(parse_expr("2^3")(0.0) == 8.0);
  CHECK(parse_expr("-x^2")(3.0) == -9.0);
  CHECK(parse_expr("2*-x")(1.5) == -3.0);
  CHECK(parse_expr("x^-1")(4.0) == 0.25);
  CHECK(parse_expr("1e-3*x")(2.0) == doctest::Approx(2e-3));
  CHECK(parse_expr("blend(0)")(7.0) == 0.5);
}

TEST_CASE("printing round-trips") {
  for (const auto& s : kSamples) {
    CAPTURE(s);
    Expr e = parse_expr(s);
    Expr r = parse_expr(e.str());
    for (double x : {-1.3, -0.2, 0.7, 2.9}) CHECK(r(x) == e(x));
    CHECK(parse_expr(r.str()).str() == r.str());
  }
}

TEST_CASE("parse errors carry offsets") {
  try {
    parse_expr("x + ");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("2*sin(x)");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
    CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expr("(x"), ParseError);
  CHECK_THROWS_AS(parse_expr("x^1.5"), ParseError);
  CHECK_THROWS_AS(parse_expr("x x"), ParseError);
}

TEST_CASE("symbolic derivative against finite differences and jets") {
  for (const auto& s : kSamples) {
    CAPTURE(s);
    Expr e = parse_expr(s);
    Expr d1 = derivative(e);
    for (double x : {-0.9, 0.3, 1.7}) {
      CHECK(d1(x) == doctest::Approx(fd(e, x)).epsilon(1e-7));
      auto t = taylor_coefficients(e, x, 4);
      double f = 1;
      for (int j = 0; j <= 4; ++j) {
        if (j) f *= j;
        double dj = derivative(e, j)(x);
        CHECK(t[j] * f == doctest::Approx(dj).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("derivative order cap") {
  Expr e = parse_expr("exp(x)");
  CHECK(derivative(e, 12)(0.3) == doctest::Approx(std::exp(0.3)));
  CHECK_THROWS_AS(derivative(e, 13), std::invalid_argument);
}

TEST_CASE("simplification") {
  Expr x = Expr::x();
  CHECK((x * 1.0).str() == "x");
  CHECK((x + 0.0).str() == "x");
  CHECK(pow(x, 0).is_one());
  CHECK(derivative(parse_expr("3*x"), 2).is_zero());
  CHECK(!derivative(parse_expr("x^2"), 2).depends_on_x());
  CHECK((-(-x)).str() == "x");
}

TEST_CASE("compiled evaluation matches the tree") {
  for (const auto& s : kSamples) {
    Expr e = parse_expr(s);
    CompiledExpr c(e);
    for (double x : {-2.0, -0.5, 0.25, 3.3}) CHECK(c(x) == e(x));
  }
}
