#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace effcap {

// Thrown when an integral cannot be pinned down to the requested tolerance.
// Carries the best estimate obtained so far for diagnostics.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial, std::size_t evals)
      : std::runtime_error(what), partial_estimate(partial), evaluations(evals) {}

  double partial_estimate;
  std::size_t evaluations;
};

// Gauss-Laguerre rule for integral_0^inf f(x) e^{-x} dx ~= sum w_i f(x_i).
// Weights are stored as logs: for n around 200 the far nodes sit near x ~ 4n
// and the raw weights underflow double.
class GaussLaguerre {
 public:
  explicit GaussLaguerre(int n);

  static const GaussLaguerre& rule200();

  std::vector<double> nodes;        // ascending
  std::vector<double> log_weights;  // log w_i
};

// Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  static const GaussLegendre& rule10();
  static const GaussLegendre& rule20();

  std::vector<double> nodes;
  std::vector<double> weights;
};

struct AdaptiveResult {
  double value = 0.0;
  double abs_error = 0.0;  // accumulated error estimate
  std::size_t evaluations = 0;
  bool converged = false;
};

// Globally adaptive subdivision of [a, b]: per-panel Gauss-Legendre 20 with a
// 10-point comparison as the error estimate, always splitting the worst panel.
// Stops when the total error estimate drops below max(abs_tol, rel_tol*|I|).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol,
                                  double abs_tol = 0.0,
                                  std::size_t max_panels = 20000);

}  // namespace effcap
