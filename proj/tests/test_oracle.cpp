#include <cmath>
#include <complex>

#include "crosswidth/actions.hpp"
#include "crosswidth/oracle.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

const std::string kDir = CROSSWIDTH_PROBLEM_DIR;

const ValidatedProblem& r1() {
  static ValidatedProblem p = validate(load_problem(kDir + "/r1.json"));
  return p;
}

}  // namespace

TEST_CASE("uncoupled R1 has the harmonic spectrum on the real axis") {
  ValidatedProblem p = validate(with_r0(load_problem(kDir + "/r1.json"), "0"));
  for (double h : {2.0 / 41, 2.0 / 61}) {
    CAPTURE(h);
    for (const auto& l : bohr_sommerfeld(p, h)) {
      ResonanceMeasurement m = find_resonance(p, h, l.E + 0.1 * h * h);
      CHECK(std::abs(m.E.real() - ((2 * l.n + 1) * h - 1)) <= 1e-6);
      CHECK(std::abs(m.E.imag()) <= 1e-12);
    }
  }
}

TEST_CASE("R1 resonance at h = 2/41") {
  double h = 2.0 / 41;
  ResonanceMeasurement m = find_resonance(r1(), h, 1.0);
  CHECK(m.E.real() == doctest::Approx(0.99936443020).epsilon(1e-9));
  CHECK(m.E.imag() == doctest::Approx(-2.9331479522e-4).epsilon(1e-7));
  CHECK(m.note.empty());
  CHECK(m.residual < 1e-8);
}

TEST_CASE("matching determinant is holomorphic") {
  double h = 2.0 / 41;
  cplx E(0.985, -2e-3);
  double d = 1e-5;
  auto f = [&](cplx z) { return shooting_determinant(r1(), z, h).det; };
  cplx dx = (f(E + d) - f(E - d)) / (2 * d);
  cplx dy = (f(E + cplx(0, d)) - f(E - cplx(0, d))) / (2 * d);
  CHECK(std::abs(dx + cplx(0, 1) * dy) <= 1e-5 * std::abs(dx));
}

TEST_CASE("renormalization does not change the determinant") {
  double h = 2.0 / 41;
  ShootingConfig a, b;
  b.renorm_threshold = 1e3;
  cplx E(0.985, -2e-3);
  cplx da = shooting_determinant(r1(), E, h, a).det;
  cplx db = shooting_determinant(r1(), E, h, b).det;
  CHECK(std::abs(da - db) <= 1e-7 * std::abs(da));
}

TEST_CASE("shooting configuration errors") {
  ShootingConfig c;
  c.x_right = 3.0;
  CHECK_THROWS_AS(shooting_determinant(r1(), 1.0, 0.05, c), std::invalid_argument);
  c = {};
  c.x_left = -9.0;
  CHECK_THROWS_AS(shooting_determinant(r1(), 1.0, 0.05, c), std::invalid_argument);
  CHECK_THROWS_AS(boundary_basis(r1(), 1.0, 0.05, Side::left, [] {
                    ShootingConfig s;
                    s.x_left = 0.5;
                    return s;
                  }()),
                  ValidationError);
}

TEST_CASE("CAP agrees with shooting and converges in the grid") {
  double h = 2.0 / 41;
  ResonanceMeasurement s = find_resonance(r1(), h, 1.0);
  auto c1 = cap_resonances(r1(), h, 1600, {}, {1.0});
  auto c2 = cap_resonances(r1(), h, 3200, {}, {1.0});
  REQUIRE(c1.size() == 1);
  CHECK(std::abs(c1[0].E.imag() / s.E.imag() - 1.0) < 0.1);
  CHECK(std::abs(c2[0].E.imag() / s.E.imag() - 1.0) < std::abs(c1[0].E.imag() / s.E.imag() - 1.0) + 1e-3);
  CHECK(std::abs(c2[0].E.real() - s.E.real()) < std::abs(c1[0].E.real() - s.E.real()));
  CHECK(c1[0].method == Method::cap);
  CHECK_THROWS_AS(cap_resonances(r1(), h, 100), std::invalid_argument);
}

TEST_CASE("R2 oracles agree") {
  ValidatedProblem p = validate(load_problem(kDir + "/r2.json"));
  double h = 2.0 / 41;
  ResonanceMeasurement s = find_resonance(p, h, 1.0);
  CHECK(s.E.imag() < 0);
  auto c = cap_resonances(p, h, 1600, {}, {1.0});
  CHECK(std::abs(c[0].E.imag() / s.E.imag() - 1.0) < 0.1);
}

TEST_CASE("width power") {
  CHECK(width_power(r1().crossing) == 2.0);
  CrossingData c;
  c.k = 1;
  c.m = 3;
  CHECK(width_power(c) == 2.5);
  c.k = 0;
  CHECK(width_power(c) == 1.5);
  c.coupled = false;
  CHECK(width_power(c) == 2.0);
}
