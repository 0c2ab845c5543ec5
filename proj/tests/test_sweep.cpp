#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "crosswidth/sweep.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

const std::string kDir = CROSSWIDTH_PROBLEM_DIR;

const ValidatedProblem& r1() {
  static ValidatedProblem p = validate(load_problem(kDir + "/r1.json"));
  return p;
}

std::vector<SweepRow> synthetic(double p, double C, double noise, int n, double h_hi, double h_lo) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> N(0.0, noise);
  std::vector<SweepRow> rows;
  for (double h : geometric_grid(h_hi, h_lo, n)) {
    SweepRow r;
    r.h = h;
    r.D = 0.7;
    r.im_meas = -r.D * C * std::pow(h, p) * std::exp(N(rng));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("exponent fit recovers a planted power law") {
  ExponentFit f = fit_exponent(synthetic(2.5, 1.3, 0.02, 12, 0.1, 0.01));
  CHECK(f.p_hat == doctest::Approx(2.5).epsilon(0.02));
  CHECK(f.C_hat == doctest::Approx(1.3).epsilon(0.1));
  CHECK(f.p_sigma < 0.05);
  CHECK(f.rows_used == 12);
  ExponentFit exact = fit_exponent(synthetic(2.0, 1.0, 0.0, 5, 0.1, 0.01));
  CHECK(exact.p_hat == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exponent fit preconditions") {
  CHECK_THROWS_AS(fit_exponent(synthetic(2.0, 1.0, 0.0, 3, 0.1, 0.01)), std::invalid_argument);
  CHECK_THROWS_AS(fit_exponent(synthetic(2.0, 1.0, 0.0, 6, 0.05, 0.03)), std::invalid_argument);
  CHECK_NOTHROW(fit_exponent(synthetic(2.0, 1.0, 0.0, 6, 0.05, 0.03), 0.2));
  auto rows = synthetic(2.0, 1.0, 0.0, 6, 0.1, 0.01);
  rows[0].skipped = true;
  rows[1].im_meas = 1e-5;
  CHECK(fit_exponent(rows).rows_used == 4);
}

TEST_CASE("grid from Bohr-Sommerfeld indices") {
  auto g = h_grid_from_n(r1(), 20, 25);
  REQUIRE(g.size() == 6);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i].h == doctest::Approx(2.0 / (2 * g[i].n + 1)).epsilon(1e-13));
    CHECK(g[i].E_bs == 1.0);
    CHECK(g[i].skip == (std::abs(g[i].cos_factor) < 0.3));
    if (i) CHECK(g[i].h < g[i - 1].h);
  }
  CHECK(g[5].skip);
  CHECK(g[5].reason == "near node");
}

TEST_CASE("grid choice preconditions") {
  CHECK_THROWS_AS(choose_h_grid(r1(), 3, 0.03, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(choose_h_grid(r1(), 5, 0.01, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(choose_h_grid(r1(), 5, 0.05, 0.03), std::invalid_argument);
  auto g = choose_h_grid(r1(), 5, 0.02, 0.2);
  CHECK(g.size() == 5);
  CHECK(g.front().h <= 0.2);
  CHECK(g.back().h >= 0.02);
}

TEST_CASE("small R1 sweep") {
  auto g = h_grid_from_n(r1(), 20, 23);
  SweepReport r = run_sweep(r1(), g);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CAPTURE(row.n);
    CHECK_FALSE(row.skipped);
    CHECK(row.ratio > 0.7);
    CHECK(row.ratio < 1.3);
    CHECK(row.power_pred == 2.0);
  }
  CHECK_FALSE(r.fit.has_value());
  CHECK_FALSE(r.fit_error.empty());

  std::string csv = sweep_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kSweepHeader);
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 4);
  CHECK(csv == sweep_csv(run_sweep(r1(), g)));

  std::string svg = sweep_svg(r);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
