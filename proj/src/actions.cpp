#include "crosswidth/actions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "crosswidth/quadrature.hpp"

namespace crosswidth {

namespace {

constexpr double kQuadTol = 1e-12;

struct Potentials {
  Expr V1e, V2e;
  CompiledExpr V1, V2, dV1, dV2;
  explicit Potentials(const ValidatedProblem& p)
      : V1e(p.V1), V2e(p.V2), V1(p.V1), V2(p.V2), dV1(derivative(p.V1)), dV2(derivative(p.V2)) {}
};

void check_window(const ValidatedProblem& p, double E) {
  if (!(std::abs(E - p.spec.E0) <= p.spec.delta0))
    throw std::out_of_range("energy " + std::to_string(E) + " outside |E - E0| <= delta0");
}

// First zero of V - E met when walking from 0 in direction dir.
template <class F, class DF>
double scan_root(F V, DF dV, double E, double dir, double limit, double dx) {
  auto f = [&](double x) { return V(x) - E; };
  double x0 = 0.0, f0 = f(0.0);
  if (!(f0 < 0)) throw ConvergenceError("assumption violated at energy " + std::to_string(E));
  while (dir * x0 < dir * limit) {
    double x1 = x0 + dir * dx;
    if (dir * x1 > dir * limit) x1 = limit;
    double f1 = f(x1);
    if (f1 >= 0) {
      double lo = std::min(x0, x1), hi = std::max(x0, x1);
      return refine_root(f, dV, lo, hi, 1e-10, 5);
    }
    x0 = x1;
  }
  throw ConvergenceError("assumption violated at energy " + std::to_string(E));
}

TurningPoints tp(const Potentials& P, const ValidatedProblem& p, double E) {
  double dx = (p.spec.xR - p.spec.xL) / kValidationGrid;
  TurningPoints t;
  t.a = scan_root(P.V1, P.dV1, E, -1.0, p.spec.xL, dx);
  t.a_prime = scan_root(P.V1, P.dV1, E, +1.0, p.spec.xR, dx);
  t.b = scan_root(P.V2, P.dV2, E, +1.0, p.spec.xR, dx);
  if (!(t.a < 0 && 0 < t.b && t.b < t.a_prime))
    throw ConvergenceError("assumption violated at energy " + std::to_string(E) +
                           ": turning points out of order");
  return t;
}

double sqrt_pos(double v) { return v > 0 ? std::sqrt(v) : 0.0; }

// int_lo^end sqrt(E - V) (power=+1) or 1/sqrt (power=-1), turning point at
// `end`. Near the end, E - V = s Q(s) with Q summed from the Taylor series, so
// no cancellation; s = t^2 removes the square root.
template <class F>
double well_integral(F V, const Expr& Ve, double E, double lo, double end, double power) {
  double dir = end > lo ? -1.0 : 1.0;
  double len = std::abs(end - lo);
  double mid = 0.5 * len;
  constexpr int kOrder = 16;
  std::vector<double> c = taylor_coefficients(Ve, end, kOrder);
  std::vector<double> q(kOrder);  // Q(s) = sum q_j s^j
  double sg = dir;
  for (int j = 1; j <= kOrder; ++j) {
    q[j - 1] = -c[j] * sg;
    sg *= dir;
  }
  double s0 = mid;
  if (c[kOrder] != 0.0 && q[0] != 0.0)
    s0 = std::min(mid, std::pow(1e-17 * std::abs(q[0]) / std::abs(c[kOrder]), 1.0 / (kOrder - 1)));
  auto Q = [&](double s) {
    double r = 0.0;
    for (int j = kOrder - 1; j >= 0; --j) r = r * s + q[j];
    return r;
  };
  auto g = [&](double s) {
    double w = E - V(end + dir * s);
    return power > 0 ? sqrt_pos(w) : 1.0 / std::sqrt(w);
  };
  double T0 = std::sqrt(s0), T = std::sqrt(mid);
  double total = integrate(
      [&](double t) {
        double qq = Q(t * t);
        return power > 0 ? 2.0 * t * t * sqrt_pos(qq) : 2.0 / std::sqrt(qq);
      },
      0.0, T0, kQuadTol / 3);
  if (T > T0) total += integrate([&](double t) { return 2.0 * t * g(t * t); }, T0, T, kQuadTol / 3);
  total += integrate(g, mid, len, kQuadTol / 3);
  return total;
}

double A_impl(const Potentials& P, const TurningPoints& t, double E, double power) {
  double left = well_integral(P.V1, P.V1e, E, 0.0, t.a, power);
  double right = well_integral(P.V1, P.V1e, E, 0.0, t.a_prime, power);
  return left + right;
}

}  // namespace

TurningPoints turning_points(const ValidatedProblem& p, double E) {
  check_window(p, E);
  Potentials P(p);
  return tp(P, p, E);
}

double action_A(const ValidatedProblem& p, double E) {
  check_window(p, E);
  Potentials P(p);
  return 2.0 * A_impl(P, tp(P, p, E), E, +1.0);
}

double dAdE(const ValidatedProblem& p, double E) {
  check_window(p, E);
  Potentials P(p);
  return A_impl(P, tp(P, p, E), E, -1.0);
}

double action_S(const ValidatedProblem& p, double E) {
  check_window(p, E);
  Potentials P(p);
  TurningPoints t = tp(P, p, E);
  double i1 = well_integral(P.V1, P.V1e, E, 0.0, t.a_prime, +1.0);
  double i2 = well_integral(P.V2, P.V2e, E, 0.0, t.b, +1.0);
  return 2.0 * (i1 - i2);
}

ActionTable action_table(const ValidatedProblem& p, double E) {
  check_window(p, E);
  Potentials P(p);
  TurningPoints t = tp(P, p, E);
  ActionTable r;
  r.E = E;
  r.A = 2.0 * A_impl(P, t, E, +1.0);
  r.dAdE = A_impl(P, t, E, -1.0);
  double i1 = well_integral(P.V1, P.V1e, E, 0.0, t.a_prime, +1.0);
  double i2 = well_integral(P.V2, P.V2e, E, 0.0, t.b, +1.0);
  r.S = 2.0 * (i1 - i2);
  r.a = t.a;
  r.b = t.b;
  r.a_prime = t.a_prime;
  return r;
}

std::vector<BohrSommerfeldLevel> bohr_sommerfeld(const ValidatedProblem& p, double h) {
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  Potentials P(p);
  auto A = [&](double E) { return 2.0 * A_impl(P, tp(P, p, E), E, +1.0); };
  auto dA = [&](double E) { return A_impl(P, tp(P, p, E), E, -1.0); };
  const double pi = std::numbers::pi;
  double lo = p.spec.E0 - h * p.spec.delta0, hi = p.spec.E0 + h * p.spec.delta0;
  double Alo = A(lo), Ahi = A(hi);
  long nlo = static_cast<long>(std::ceil((Alo / (pi * h) - 1.0) / 2.0));
  long nhi = static_cast<long>(std::floor((Ahi / (pi * h) - 1.0) / 2.0));
  std::vector<BohrSommerfeldLevel> out;
  for (long n = std::max(0L, nlo); n <= nhi; ++n) {
    double target = (2.0 * n + 1.0) * pi * h;
    double l = lo, r = hi;
    double E = lo + (target - Alo) / (Ahi - Alo) * (hi - lo);
    for (int it = 0; it < 100; ++it) {
      double f = A(E) - target;
      if (std::abs(f) <= 1e-13 * target) break;
      if (f < 0)
        l = E;
      else
        r = E;
      double En = E - f / dA(E);
      E = (En > l && En < r) ? En : 0.5 * (l + r);
      if (r - l < 1e-15) break;
    }
    out.push_back({static_cast<int>(n), E});
  }
  return out;
}

}  // namespace crosswidth
