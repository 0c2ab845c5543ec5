#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "crosswidth/stationary_phase.hpp"
#include "doctest.h"

using namespace crosswidth;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

cplx brute(const Expr& a, const Expr& phi, double h, double R = 1.0) {
  CompiledExpr ac(a), pc(phi);
  return oscillatory_integrals_fn([&](double y) { return cplx(ac(y) * bump(y, R)); },
                                  [&](double y) { return pc(y); }, -R, {R}, h)[0];
}

}  // namespace

TEST_CASE("mu parity identities") {
  for (double th : {0.1, 0.7, 2.3}) {
    CAPTURE(th);
    CHECK(close(mu(0, 1, th), std::polar(1.0, th), 1e-15));
    CHECK(close(mu(2, 3, th), std::polar(1.0, th), 1e-15));
    CHECK(std::abs(mu(1, 3, th)) == 0.0);
    CHECK(std::abs(mu(1, 1, th)) == 0.0);
    CHECK(close(mu(0, 2, th), std::cos(th), 1e-15));
    CHECK(close(mu(2, 4, th), std::cos(th), 1e-15));
    CHECK(close(mu(1, 2, th), I * std::sin(th), 1e-15));
  }
}

TEST_CASE("gamma values") {
  CHECK(std::tgamma(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(std::tgamma(0.25) == doctest::Approx(3.6256099082219083119).epsilon(1e-14));
  CHECK(std::tgamma(0.75) == doctest::Approx(1.2254167024651776451).epsilon(1e-14));
  CHECK(std::tgamma(0.25) * std::tgamma(0.75) == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("damped Fresnel integral") {
  // int e^{-y^2} e^{i y^2/h} dy = sqrt(pi / (1 - i/h))
  for (double h : {1e-1, 1e-2, 1e-3}) {
    CAPTURE(h);
    cplx num = oscillatory_integrals_fn([](double y) { return cplx(std::exp(-y * y)); },
                                        [](double y) { return y * y; }, -7.0, {7.0}, h)[0];
    cplx exact = std::sqrt(pi / (1.0 - I / h));
    CHECK(std::abs(num - exact) <= 1e-11);
  }
}

TEST_CASE("cumulative integrals agree with separate runs") {
  auto a = [](double y) { return cplx(1.0 + y); };
  auto phi = [](double y) { return y * y * y / 3; };
  std::vector<double> xs = {-0.5, 0.0, 0.3, 1.0};
  auto c = oscillatory_integrals_fn(a, phi, -1.0, xs, 1e-3);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(close(c[i], oscillatory_integrals_fn(a, phi, -1.0, {xs[i]}, 1e-3)[0], 1e-11));
  CHECK_THROWS_AS(oscillatory_integrals_fn(a, phi, -1.0, {0.5, 0.2}, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(oscillatory_integrals_fn(a, phi, -1.0, {0.5}, 1e-7), std::invalid_argument);
}

TEST_CASE("phase data") {
  Expr phi = parse_expr("x^4/4 + 0.1*x^5 + 2");
  Expr a = parse_expr("x*(1 + 3*x)");
  PhaseData d = phase_data(a, phi, 1, 3, 1e-3);
  CHECK(d.phi1_0 == doctest::Approx(1.0));
  CHECK(d.phi1p_0 == doctest::Approx(0.5));
  CHECK(d.phi_0 == doctest::Approx(2.0));
  CHECK(d.a0_0.real() == doctest::Approx(1.0));
  CHECK(d.a0p_0.real() == doctest::Approx(3.0));
  // phi = y^2: phi' = y * 2
  CHECK(phase_data(Expr(1.0), parse_expr("x^2"), 0, 1, 1e-3).phi1_0 == doctest::Approx(2.0));
  CHECK_THROWS_AS(phase_data(a, parse_expr("x^2"), 1, 3, 1e-3), std::invalid_argument);
}

TEST_CASE("quadratic phase leading term") {
  PhaseData d = phase_data(Expr(1.0), parse_expr("x^2"), 0, 1, 1e-3);
  cplx expect = std::sqrt(pi * 1e-3) * std::polar(1.0, pi / 4);
  CHECK(close(leading_general(d), expect, 1e-14));
  d.phi1_0 = -2.0;
  CHECK(close(leading_general(d), std::conj(expect), 1e-14));
}

TEST_CASE("leading term vanishes for odd k and odd m") {
  PhaseData d = phase_data(parse_expr("x + x^2"), parse_expr("x^4/4"), 1, 3, 1e-3);
  CHECK(leading_general(d) == cplx(0.0));
  OddConvention v{MuInterpretation::verbatim, BracketForm::taylor};
  CHECK(leading_odd(d, v) == cplx(0.0));
  CHECK(std::abs(leading_odd(d)) > 0.0);
}

TEST_CASE("remainder order, general case") {
  Expr a0 = parse_expr("1 + x/2");
  Expr phi = parse_expr("x^3/3 + 0.1*x^4");
  RemainderReport r = remainder_order(a0, phi, 0, 2, geometric_grid(1e-2, 1e-4, 5));
  CHECK(r.slope >= 2.0 / 3 - 0.1);
  CHECK(std::abs(r.rows.back().I_num / r.rows.back().I_lead - 1.0) < 0.05);
}

TEST_CASE("odd correction: brute force selects the Taylor bracket") {
  // k = 1, m = 3: a0 = 1 + x, phi1(0) = 1, phi1'(0) = 0.5. The two bracket
  // forms give 0.7 and 0.4.
  Expr a0 = parse_expr("1 + x");
  Expr phi = parse_expr("x^4/4 + 0.1*x^5");
  Expr a = Expr::x() * a0;
  double h = 1e-5;
  cplx I_num = brute(a, phi, h);
  PhaseData d = phase_data(a, phi, 1, 3, h);
  cplx taylor = leading_odd(d, {MuInterpretation::shifted, BracketForm::taylor});
  cplx verbatim = leading_odd(d, {MuInterpretation::shifted, BracketForm::verbatim});
  double e_t = std::abs(I_num - taylor) / std::abs(I_num);
  double e_v = std::abs(I_num - verbatim) / std::abs(I_num);
  CHECK(e_t < 0.1);
  CHECK(e_v > 0.3);
}

TEST_CASE("bound constant") {
  BoundReport b = check_bound(parse_expr("1 + x/2"), parse_expr("x^3/3"), 0, 2, -1.0, 1.0,
                              geometric_grid(1e-2, 1e-4, 4), 32);
  CHECK(b.stable);
  CHECK(b.C_min > 0);
}

TEST_CASE("line fit and grids") {
  LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_sigma == doctest::Approx(0.0).scale(1.0));
  auto g = geometric_grid(1e-2, 1e-5, 4);
  CHECK(g.front() == 1e-2);
  CHECK(g.back() == doctest::Approx(1e-5));
  CHECK(g[1] == doctest::Approx(1e-3));
  CHECK(bump(0.0, 1.0) == 1.0);
  CHECK(bump(1.0, 1.0) == 0.0);
}
