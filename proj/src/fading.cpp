#include "effcap/fading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "effcap/logsumexp.hpp"
#include "effcap/quadrature.hpp"

namespace effcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Locate the support of h(x) = integrand * e^{-x} on [0, upper) from a coarse
// log-spaced probe of log h; extends the window until the tail is dead.
// Returns {upper_limit, max_log_h}.
struct Probe {
  double upper;
  double max_log;
  bool tail_captured;
};

Probe probe_log_integrand(const std::function<double(double)>& log_h) {
  double upper = 40.0;  // 40 mean lifetimes of the exponential weight
  constexpr double kTailDrop = 50.0;
  constexpr double kUpperCap = 1e8;
  for (;;) {
    double max_log = log_h(0.0);
    const int n = 192;
    const double lo = 1e-9;
    const double ratio = std::log(upper / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double x = lo * std::exp(ratio * i);
      max_log = std::max(max_log, log_h(x));
    }
    if (log_h(upper) < max_log - kTailDrop) return {upper, max_log, true};
    if (upper >= kUpperCap) return {upper, max_log, false};
    upper *= 2.0;
  }
}

double rayleigh_expectation(double mean, const std::function<double(double)>& f,
                            double rel_tol) {
  // z = mean * x with x ~ Exp(1).
  const auto& gl = GaussLaguerre::rule200();
  double gl_sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double w = std::exp(gl.log_weights[i]);
    if (w == 0.0) break;  // far tail underflow; negligible for bounded f
    gl_sum += w * f(mean * gl.nodes[i]);
  }

  auto log_abs_h = [&](double x) {
    const double v = f(mean * x);
    return (v == 0.0 ? -kInf : std::log(std::fabs(v))) - x;
  };
  const Probe probe = probe_log_integrand(log_abs_h);
  auto h = [&](double x) { return f(mean * x) * std::exp(-x); };
  const AdaptiveResult ad = integrate_adaptive(h, 0.0, probe.upper, rel_tol);
  if (!probe.tail_captured) {
    throw QuadratureError("fading expectation: integrand tail beyond probe cap",
                          ad.value, ad.evaluations);
  }
  if (!ad.converged) {
    throw QuadratureError("fading expectation did not converge", ad.value,
                          ad.evaluations);
  }
  const double scale = std::max({std::fabs(gl_sum), std::fabs(ad.value), 1e-300});
  if (std::fabs(gl_sum - ad.value) <= rel_tol * scale) {
    return gl_sum;
  }
  // The Laguerre nodes cannot resolve boundary layers narrower than the first
  // node (~1/(4n)); the converged adaptive estimate is authoritative there.
  return ad.value;
}

double rayleigh_log_expectation(double mean, const std::function<double(double)>& g,
                                double rel_tol) {
  const auto& gl = GaussLaguerre::rule200();
  std::vector<double> terms(gl.nodes.size());
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    terms[i] = gl.log_weights[i] + g(mean * gl.nodes[i]);
  }
  const double gl_log = log_sum_exp(terms);

  auto log_h = [&](double x) { return g(mean * x) - x; };
  const Probe probe = probe_log_integrand(log_h);
  const double shift = probe.max_log;
  if (!std::isfinite(shift)) {
    throw QuadratureError("fading log-expectation: integrand vanished or blew up",
                          shift, 0);
  }
  if (!probe.tail_captured) {
    // best effort over the truncated window for the diagnostic
    std::vector<double> partial_terms(gl.nodes.size());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      partial_terms[i] = gl.log_weights[i] + g(mean * gl.nodes[i]);
    }
    throw QuadratureError("fading log-expectation: integrand tail beyond probe cap",
                          log_sum_exp(partial_terms), gl.nodes.size());
  }
  auto h = [&](double x) {
    const double e = log_h(x) - shift;
    return e < -745.0 ? 0.0 : std::exp(e);
  };
  const AdaptiveResult ad = integrate_adaptive(h, 0.0, probe.upper, rel_tol);
  if (!ad.converged || !(ad.value > 0.0)) {
    throw QuadratureError("fading log-expectation did not converge",
                          shift + std::log(std::max(ad.value, 1e-300)),
                          ad.evaluations);
  }
  const double ad_log = shift + std::log(ad.value);
  // Agreement in log space == relative agreement of the expectations.
  if (std::fabs(gl_log - ad_log) <= 10.0 * rel_tol * std::max(1.0, std::fabs(ad_log))) {
    return gl_log;
  }
  return ad_log;
}

}  // namespace

FadingDistribution FadingDistribution::rayleigh(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("fading: rayleigh mean must be positive");
  }
  return FadingDistribution(Rayleigh{mean});
}

FadingDistribution FadingDistribution::constant(double z0) {
  if (!(z0 >= 0.0) || !std::isfinite(z0)) {
    throw std::invalid_argument("fading: constant gain must be nonnegative");
  }
  return FadingDistribution(Constant{z0});
}

FadingDistribution FadingDistribution::discrete(std::vector<DiscreteAtom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("fading: discrete needs atoms");
  double psum = 0.0;
  for (const auto& a : atoms) {
    if (!(a.z >= 0.0) || !std::isfinite(a.z)) {
      throw std::invalid_argument("fading: discrete gains must be nonnegative");
    }
    if (!(a.p > 0.0)) {
      throw std::invalid_argument("fading: discrete probabilities must be positive");
    }
    psum += a.p;
  }
  if (std::fabs(psum - 1.0) > 1e-12) {
    throw std::invalid_argument("fading: discrete probabilities must sum to 1");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const DiscreteAtom& a, const DiscreteAtom& b) { return a.z < b.z; });
  return FadingDistribution(Discrete{std::move(atoms)});
}

FadingDistribution FadingDistribution::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("fading: expected '<kind>:<params>', got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("fading: bad number '" + s + "' in '" + text + "'");
    }
    if (used != s.size()) {
      throw std::invalid_argument("fading: bad number '" + s + "' in '" + text + "'");
    }
    return v;
  };
  if (kind == "rayleigh") return rayleigh(to_double(params));
  if (kind == "constant") return constant(to_double(params));
  if (kind == "discrete") {
    std::vector<DiscreteAtom> atoms;
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) {
        throw std::invalid_argument("fading: expected '<z>@<p>', got '" + item + "'");
      }
      atoms.push_back({to_double(item.substr(0, at)), to_double(item.substr(at + 1))});
    }
    return discrete(std::move(atoms));
  }
  throw std::invalid_argument("fading: unknown kind '" + kind + "'");
}

std::string FadingDistribution::describe() const {
  char buf[64];
  return std::visit(
      [&](const auto& law) -> std::string {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          std::snprintf(buf, sizeof buf, "rayleigh:%.12g", law.mean);
          return buf;
        } else if constexpr (std::is_same_v<T, Constant>) {
          std::snprintf(buf, sizeof buf, "constant:%.12g", law.z0);
          return buf;
        } else {
          std::string out = "discrete:";
          for (std::size_t i = 0; i < law.atoms.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.12g@%.12g", i ? "," : "",
                          law.atoms[i].z, law.atoms[i].p);
            out += buf;
          }
          return out;
        }
      },
      law_);
}

double FadingDistribution::expectation(const std::function<double(double)>& f,
                                       double rel_tol) const {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return rayleigh_expectation(law.mean, f, rel_tol);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return f(law.z0);
        } else {
          double sum = 0.0;
          for (const auto& a : law.atoms) sum += a.p * f(a.z);
          return sum;
        }
      },
      law_);
}

double FadingDistribution::log_expectation_exp(const std::function<double(double)>& g,
                                               double rel_tol) const {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return rayleigh_log_expectation(law.mean, g, rel_tol);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return g(law.z0);
        } else {
          std::vector<double> terms;
          terms.reserve(law.atoms.size());
          for (const auto& a : law.atoms) terms.push_back(std::log(a.p) + g(a.z));
          return log_sum_exp(terms);
        }
      },
      law_);
}

double FadingDistribution::sample(CounterRng& rng) const {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return -law.mean * std::log(rng.next_uniform());
        } else if constexpr (std::is_same_v<T, Constant>) {
          rng.next_uniform();  // keep draw indices aligned across laws
          return law.z0;
        } else {
          const double u = rng.next_uniform();
          double cum = 0.0;
          for (const auto& a : law.atoms) {
            cum += a.p;
            if (u <= cum) return a.z;
          }
          return law.atoms.back().z;  // guard against rounding in cum
        }
      },
      law_);
}

double FadingDistribution::mean_gain() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return law.mean;
        } else if constexpr (std::is_same_v<T, Constant>) {
          return law.z0;
        } else {
          double m = 0.0;
          for (const auto& a : law.atoms) m += a.p * a.z;
          return m;
        }
      },
      law_);
}

double FadingDistribution::min_gain() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Constant>) {
          return law.z0;
        } else {
          return law.atoms.front().z;
        }
      },
      law_);
}

double FadingDistribution::max_gain() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return kInf;
        } else if constexpr (std::is_same_v<T, Constant>) {
          return law.z0;
        } else {
          return law.atoms.back().z;
        }
      },
      law_);
}

bool FadingDistribution::is_degenerate() const {
  return std::visit(
      [](const auto& law) -> bool {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Rayleigh>) {
          return false;
        } else if constexpr (std::is_same_v<T, Constant>) {
          return true;
        } else {
          return law.atoms.size() == 1;
        }
      },
      law_);
}

}  // namespace effcap
