#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "crosswidth/actions.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

const std::string kDir = CROSSWIDTH_PROBLEM_DIR;
constexpr double pi = std::numbers::pi;

const ValidatedProblem& r1() {
  static ValidatedProblem p = validate(load_problem(kDir + "/r1.json"));
  return p;
}
const ValidatedProblem& r2() {
  static ValidatedProblem p = validate(load_problem(kDir + "/r2.json"));
  return p;
}

// int_0^end sqrt(E - V) by tanh-sinh, a route separate from the library's
template <class F>
double ts_sqrt(F V, double E, double end) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double x) {
    double w = E - V(x);
    return w > 0 ? std::sqrt(w) : 0.0;
  };
  return end > 0 ? ts.integrate(f, 0.0, end) : -ts.integrate(f, end, 0.0);
}

}  // namespace

TEST_CASE("R1 action closed forms") {
  // V1 = (x-1)^2 - 1 inside the well, so A(E) = pi (E + 1)
  for (double E : {0.3, 1.0, 1.7}) {
    CAPTURE(E);
    CHECK(std::abs(action_A(r1(), E) - pi * (E + 1)) <= 1e-10);
    CHECK(std::abs(dAdE(r1(), E) - pi) <= 1e-10);
    TurningPoints t = turning_points(r1(), E);
    CHECK(t.a == doctest::Approx(1 - std::sqrt(E + 1)).epsilon(1e-12));
    CHECK(t.a_prime == doctest::Approx(1 + std::sqrt(E + 1)).epsilon(1e-12));
    CHECK(t.b == doctest::Approx(std::atanh(E / 4)).epsilon(1e-12));
  }
  CHECK(std::abs(action_A(r1(), 1.0) - 2 * pi) <= 1e-12);
  CHECK(std::abs(dAdE(r1(), 1.0) - pi) <= 1e-12);
}

TEST_CASE("R1 S") {
  ActionTable t = action_table(r1(), 1.0);
  CHECK(t.S == doctest::Approx(5.374143639798887).epsilon(1e-13));
  // well piece in closed form, channel-2 piece by a second quadrature
  double well = 3 * pi / 4 + 0.5;
  double open = ts_sqrt([](double x) { return 4 * std::tanh(x); }, 1.0, std::atanh(0.25));
  CHECK(std::abs(t.S - 2 * (well - open)) <= 1e-12);
}

TEST_CASE("R2 S against tanh-sinh") {
  ActionTable t = action_table(r2(), 1.0);
  double i1 = ts_sqrt([](double x) { return x * x - 2 * x; }, 1.0, t.a_prime);
  double i2 = ts_sqrt([](double x) { return x * x - 2 * x + 4 * x * x * x; }, 1.0, t.b);
  CHECK(std::abs(t.S - 2 * (i1 - i2)) <= 1e-12);
  CHECK(t.S == doctest::Approx(4.1017511847934944).epsilon(1e-13));
}

TEST_CASE("dAdE is the derivative of A") {
  double E = 1.2, d = 1e-4;
  for (const ValidatedProblem* p : {&r1(), &r2()}) {
    double fd = (action_A(*p, E + d) - action_A(*p, E - d)) / (2 * d);
    CHECK(dAdE(*p, E) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("energy window") {
  CHECK_THROWS_AS(action_A(r1(), 2.0), std::out_of_range);
  CHECK_THROWS_AS(turning_points(r1(), 0.05), std::out_of_range);
}

TEST_CASE("Bohr-Sommerfeld levels") {
  auto l = bohr_sommerfeld(r1(), 2.0 / 41);
  REQUIRE(l.size() == 1);
  CHECK(l[0].n == 20);
  CHECK(std::abs(l[0].E - 1.0) <= 1e-12);
  CHECK(bohr_sommerfeld(r1(), 0.05).empty());
  auto m = bohr_sommerfeld(r1(), 0.03);
  REQUIRE(m.size() == 1);
  CHECK(m[0].n == 33);
  CHECK(std::abs(m[0].E - (67 * 0.03 - 1)) <= 1e-12);
  for (const auto& q : bohr_sommerfeld(r2(), 0.021)) {
    double A = action_A(r2(), q.E);
    CHECK(std::abs(A - (2 * q.n + 1) * pi * 0.021) <= 1e-11);
  }
  CHECK_THROWS_AS(bohr_sommerfeld(r1(), -1.0), std::invalid_argument);
}
