#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace effcap {

// Bracketing bisection; assumes f(lo) and f(hi) have opposite signs (either
// may be zero). Monotone or sign-definite-convex targets only, so no
// derivative-based acceleration is needed.
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol = 1e-9, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect_root: endpoints do not bracket a sign change");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::fabs(mid), 1e-300)) return mid;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace effcap
