#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "effcap/rng.hpp"

namespace effcap {

// Laws of the channel power gain z = |g|^2. "Rayleigh" fading on the
// amplitude means z is exponential with the given mean.
struct Rayleigh {
  double mean;
};

struct Constant {
  double z0;
};

struct DiscreteAtom {
  double z;
  double p;
};

struct Discrete {
  std::vector<DiscreteAtom> atoms;  // sorted by z, probabilities sum to 1
};

using FadingLaw = std::variant<Rayleigh, Constant, Discrete>;

class FadingDistribution {
 public:
  static FadingDistribution rayleigh(double mean);
  static FadingDistribution constant(double z0);
  static FadingDistribution discrete(std::vector<DiscreteAtom> atoms);

  // "rayleigh:<mean>" | "constant:<z0>" | "discrete:<z1>@<p1>,<z2>@<p2>,..."
  static FadingDistribution parse(const std::string& text);
  std::string describe() const;

  // E_z{ f(z) }. Closed form for Constant/Discrete; Gauss-Laguerre (200
  // nodes) cross-checked by adaptive subdivision for Rayleigh. Intended for
  // polynomially bounded f; use log_expectation_exp for exponential tilts.
  double expectation(const std::function<double(double)>& f,
                     double rel_tol = 1e-10) const;

  // log E_z{ e^{g(z)} } evaluated fully in log space (g is the exponent).
  double log_expectation_exp(const std::function<double(double)>& g,
                             double rel_tol = 1e-10) const;

  // One i.i.d. draw; deterministic given the generator's (seed, index).
  double sample(CounterRng& rng) const;

  double mean_gain() const;
  double min_gain() const;  // essential infimum
  double max_gain() const;  // essential supremum; +inf for Rayleigh
  bool is_degenerate() const;

  const FadingLaw& law() const { return law_; }

 private:
  explicit FadingDistribution(FadingLaw law) : law_(std::move(law)) {}
  FadingLaw law_;
};

}  // namespace effcap
