#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crosswidth/errors.hpp"

namespace crosswidth {

// Adaptive 31-point Gauss-Kronrod on [a, b]; throws if the error estimate
// stays above the absolute target. Mapped to [-1, 1] first: boost compares
// leaf errors in unit-interval scale against tolerances in the caller's scale.
template <class F>
double integrate(F f, double a, double b, double abs_tol = 1e-12, unsigned depth = 18) {
  if (a == b) return 0.0;
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double u) { return s * f(c + s * u); }, -1.0, 1.0, depth, 1e-14, &err);
  if (!(err <= abs_tol) || !std::isfinite(v)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "quadrature did not converge (error estimate %.3g)", err);
    throw ConvergenceError(buf);
  }
  return v;
}

// Integral of f over [a, b] where f may behave like (x-a)^{+-1/2} and/or
// (b-x)^{+-1/2} at the ends. The interval is split at its midpoint and each
// half is mapped by x = a + t^2 (resp. x = b - t^2), which removes the
// square-root branch.
template <class F>
double integrate_sqrt_ends(F f, double a, double b, bool sing_a, bool sing_b,
                           double abs_tol = 1e-12) {
  if (a == b) return 0.0;
  double mid = 0.5 * (a + b);
  double left, right;
  if (sing_a) {
    double T = std::sqrt(mid - a);
    left = integrate([&](double t) { return 2.0 * t * f(a + t * t); }, 0.0, T, abs_tol / 2);
  } else {
    left = integrate(f, a, mid, abs_tol / 2);
  }
  if (sing_b) {
    double T = std::sqrt(b - mid);
    right = integrate([&](double t) { return 2.0 * t * f(b - t * t); }, 0.0, T, abs_tol / 2);
  } else {
    right = integrate(f, mid, b, abs_tol / 2);
  }
  return left + right;
}

}  // namespace crosswidth
