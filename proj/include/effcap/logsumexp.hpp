#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace effcap {

// log(sum_i exp(args[i])) with the usual max shift; -inf entries drop out.
inline double log_sum_exp(std::span<const double> args) {
  double max_arg = -std::numeric_limits<double>::infinity();
  for (double a : args) {
    if (a > max_arg) max_arg = a;
  }
  if (!std::isfinite(max_arg)) return max_arg;  // empty, all -inf, or nan
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - max_arg);
  return max_arg + std::log(sum);
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace effcap
