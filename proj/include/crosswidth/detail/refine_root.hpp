#pragma once

#include <cmath>

namespace crosswidth {

template <class F, class DF>
double refine_root(F f, DF df, double lo, double hi, double tol, int polish) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  double width = hi - lo;
  for (int i = 0; i < polish; ++i) {
    double d = df(x);
    if (d == 0.0 || !std::isfinite(d)) break;
    double step = f(x) / d;
    if (std::abs(step) > width) break;
    x -= step;
  }
  return x;
}

}  // namespace crosswidth
