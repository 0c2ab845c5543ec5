#include <cmath>
#include <numbers>
#include <string>

#include "crosswidth/problem.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

const std::string kDir = CROSSWIDTH_PROBLEM_DIR;

std::string validation_message(const ProblemSpec& s) {
  try {
    validate(s);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& sub) {
  return s.find(sub) != std::string::npos;
}

}  // namespace

TEST_CASE("R1 crossing data") {
  ValidatedProblem p = validate(load_problem(kDir + "/r1.json"));
  CHECK(p.crossing.m == 1);
  CHECK(p.crossing.k == 0);
  CHECK(p.crossing.coupled);
  CHECK(p.a == doctest::Approx(1 - std::numbers::sqrt2).epsilon(1e-12));
  CHECK(p.a_prime == doctest::Approx(1 + std::numbers::sqrt2).epsilon(1e-12));
  CHECK(p.b == doctest::Approx(std::atanh(0.25)).epsilon(1e-12));
  CHECK(p.crossing.v_m == doctest::Approx(6.0));
  CHECK(p.crossing.v_m1 == doctest::Approx(-2.0));
  CHECK(p.crossing.r_k == 1.0);
  CHECK(p.crossing.dV1_0 == doctest::Approx(-2.0));
  CHECK(p.crossing.dV2_0 == doctest::Approx(4.0));
}

TEST_CASE("R2 crossing data") {
  ValidatedProblem p = validate(load_problem(kDir + "/r2.json"));
  CHECK(p.crossing.m == 3);
  CHECK(p.crossing.k == 1);
  CHECK(p.crossing.v_m == doctest::Approx(24.0));
  CHECK(p.crossing.v_m1 == doctest::Approx(0.0));
  CHECK(p.crossing.r_k == 1.0);
  // 4b^3 + b^2 - 2b = 1 has one real root
  double b = p.b;
  CHECK(4 * b * b * b + b * b - 2 * b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b == doctest::Approx(0.78769256).epsilon(1e-7));
  // the cubic's local maximum sits below E0
  double xm = (-2.0 - std::sqrt(4.0 + 96.0)) / 24.0;
  CHECK(4 * xm * xm * xm + xm * xm - 2 * xm < 1.0);
}

TEST_CASE("assumption failures") {
  CHECK(contains(validation_message(load_problem(kDir + "/../tests/data/bad_b.json")), "b <= 0"));

  ProblemSpec base = load_problem(kDir + "/r1.json");
  CHECK(contains(validation_message(with_r0(base, "x")), "k >= m"));

  // V2 - V1 = x^2 (4x - 1): even contact at 0, sign change at 1/4
  ProblemSpec even = make_spec("x^2 - 2*x", "4*x^3 - 2*x", "1", "0", 1.0, 0.9, -8, 8);
  CHECK(contains(validation_message(even), "second crossing"));

  ProblemSpec twice =
      make_spec("x^2 - 2*x", "4*tanh(x) + 0.05*x^3", "1", "0", 1.0, 0.9, -8, 8);
  CHECK(contains(validation_message(twice), "second crossing"));

  ProblemSpec close = base;
  close.flatten[0].start = 2.5;
  CHECK(contains(validation_message(close), "intersects"));

  ProblemSpec shifted = make_spec("x^2 - 2*x + 0.1", "4*tanh(x)", "1", "0", 1.0, 0.9, -8, 8);
  CHECK(contains(validation_message(shifted), "not normalized"));

  ProblemSpec bad_delta = base;
  bad_delta.delta0 = 1.5;
  CHECK(contains(validation_message(bad_delta), "delta0"));
}

TEST_CASE("uncoupled problem validates") {
  ProblemSpec s = with_r0(load_problem(kDir + "/r1.json"), "0");
  ValidatedProblem p = validate(s);
  CHECK_FALSE(p.crossing.coupled);
}

TEST_CASE("vanishing order") {
  CHECK(vanishing_order(parse_expr("x^3 - x^4"), 0.0).order == 3);
  CHECK(vanishing_order(parse_expr("x^3 - x^4"), 0.0).value == doctest::Approx(6.0));
  CHECK(vanishing_order(parse_expr("tanh(x)"), 0.0).order == 1);
  CHECK_THROWS_AS(vanishing_order(parse_expr("0*x"), 0.0), std::domain_error);
}

TEST_CASE("flattening") {
  FlattenRecipe f{Side::right, Channel::V1, 3.0, 5.0, 0.4};
  Expr V = apply_flatten(parse_expr("x^2"), f);
  CHECK(V(0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(V(2.5) == doctest::Approx(6.25).epsilon(1e-12));
  CHECK(V(4.0) == doctest::Approx(5.0).epsilon(1e-12));
  FlattenRecipe g{Side::left, Channel::V2, -1.0, -2.0, 0.4};
  Expr W = apply_flatten(parse_expr("x"), g);
  CHECK(W(-3.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(W(0.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("json round trip and errors") {
  ProblemSpec s = load_problem(kDir + "/r2.json");
  ProblemSpec t = problem_from_json_text(problem_to_json_text(s));
  CHECK(t.V1_text == s.V1_text);
  CHECK(t.V2_text == s.V2_text);
  CHECK(t.r0_text == s.r0_text);
  CHECK(t.flatten.size() == 3);
  CHECK(t.flatten[1].side == Side::left);
  CHECK(t.xL == s.xL);
  CHECK_THROWS_AS(problem_from_json_text("{"), ValidationError);
  CHECK_THROWS_AS(problem_from_json_text("{\"V1\": \"x\"}"), ValidationError);
  CHECK_THROWS_AS(
      problem_from_json_text(R"({"V1":"x+","V2":"x","r0":"1","E0":1,"delta0":0.5,"box":[-1,1]})"),
      ValidationError);
}

TEST_CASE("refine_root") {
  auto f = [](double x) { return std::cos(x); };
  auto df = [](double x) { return -std::sin(x); };
  CHECK(refine_root(f, df, 1.0, 2.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}
