#include "effcap/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace effcap {

namespace {

// L_n(x) and L_{n+1}(x) by the three-term recurrence, in long double so the
// oscillation envelope (~e^{x/2} near the last root) keeps full headroom.
struct LaguerrePair {
  long double ln;    // L_n
  long double lnm1;  // L_{n-1}
  long double lnp1;  // L_{n+1}
};

LaguerrePair laguerre_eval(int n, long double x) {
  long double p1 = 1.0L, p2 = 0.0L;
  for (int j = 1; j <= n; ++j) {
    const long double p3 = p2;
    p2 = p1;
    p1 = ((2 * j - 1 - x) * p2 - (j - 1) * p3) / j;
  }
  const long double pnp1 = ((2 * n + 1 - x) * p1 - n * p2) / (n + 1);
  return {p1, p2, pnp1};
}

}  // namespace

GaussLaguerre::GaussLaguerre(int n) {
  if (n < 2) throw std::invalid_argument("GaussLaguerre: need n >= 2");
  nodes.resize(n);
  log_weights.resize(n);

  long double z = 0.0L, z_prev = 0.0L;
  for (int i = 0; i < n; ++i) {
    // Stroud/Secrest style initial guesses, then Newton.
    if (i == 0) {
      z = 3.0L / (1.0L + 2.4L * n);
    } else if (i == 1) {
      z_prev = z;
      z += 15.0L / (1.0L + 2.5L * n);
    } else {
      const long double ai = i - 1;
      const long double step = ((1.0L + 2.55L * ai) / (1.9L * ai)) * (z - z_prev);
      z_prev = z;
      z += step;
    }

    LaguerrePair lp{};
    for (int it = 0; it < 200; ++it) {
      lp = laguerre_eval(n, z);
      const long double deriv = n * (lp.ln - lp.lnm1) / z;  // L_n'(x) = n(L_n - L_{n-1})/x
      const long double dz = lp.ln / deriv;
      z -= dz;
      if (std::fabs(dz) <= 1e-19L * std::fabs(z)) break;
    }
    lp = laguerre_eval(n, z);

    nodes[i] = static_cast<double>(z);
    // w_i = x_i / ((n+1) L_{n+1}(x_i))^2
    const long double log_w =
        std::log(z) - 2.0L * (std::log(static_cast<long double>(n + 1)) +
                              std::log(std::fabs(lp.lnp1)));
    log_weights[i] = static_cast<double>(log_w);
  }
}

const GaussLaguerre& GaussLaguerre::rule200() {
  static const GaussLaguerre rule(200);
  return rule;
}

GaussLegendre::GaussLegendre(int n) {
  if (n < 2) throw std::invalid_argument("GaussLegendre: need n >= 2");
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double z = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (int j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      const long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-19L) break;
    }
    nodes[i] = static_cast<double>(-z);
    nodes[n - 1 - i] = static_cast<double>(z);
    const double w = static_cast<double>(2.0L / ((1.0L - z * z) * pp * pp));
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

const GaussLegendre& GaussLegendre::rule10() {
  static const GaussLegendre rule(10);
  return rule;
}

const GaussLegendre& GaussLegendre::rule20() {
  static const GaussLegendre rule(20);
  return rule;
}

namespace {

double fixed_gauss(const std::function<double(double)>& f, double a, double b,
                   const GaussLegendre& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

struct Panel {
  double a, b;
  double value;  // GL20
  double error;  // |GL20 - GL10|
};

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie break
  }
};

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol,
                                  double abs_tol, std::size_t max_panels) {
  AdaptiveResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  const auto& g20 = GaussLegendre::rule20();
  const auto& g10 = GaussLegendre::rule10();

  auto make_panel = [&](double lo, double hi) {
    const double v20 = fixed_gauss(f, lo, hi, g20);
    const double v10 = fixed_gauss(f, lo, hi, g10);
    res.evaluations += 30;
    return Panel{lo, hi, v20, std::fabs(v20 - v10)};
  };

  // Geometric seed panels resolve integrands pinned to the left endpoint
  // without burning refinement depth.
  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
  double total = 0.0, total_err = 0.0;
  const int seed_splits = 16;
  double lo = a;
  for (int k = seed_splits; k >= 1; --k) {
    const double hi = (k == 1) ? b : a + (b - a) * std::ldexp(1.0, -(k - 1));
    if (!(hi > lo)) continue;
    Panel p = make_panel(lo, hi);
    total += p.value;
    total_err += p.error;
    queue.push(p);
    lo = hi;
  }

  const double width_floor =
      16.0 * std::numeric_limits<double>::epsilon() * (std::fabs(a) + std::fabs(b) + 1.0);

  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total)) &&
         queue.size() < max_panels) {
    Panel worst = queue.top();
    if (worst.error <= 0.0 || (worst.b - worst.a) <= width_floor) break;
    queue.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    for (const Panel& child : {make_panel(worst.a, mid), make_panel(mid, worst.b)}) {
      total += child.value;
      total_err += child.error;
      queue.push(child);
    }
  }

  res.value = total;
  res.abs_error = total_err;
  res.converged =
      std::isfinite(total) && total_err <= std::max(abs_tol, rel_tol * std::fabs(total));
  return res;
}

}  // namespace effcap
