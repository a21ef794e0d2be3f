#include "effcap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "effcap/roots.hpp"

namespace effcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Case-II objective J(theta) = -(Lambda2(-theta) + Lambda1(theta - theta1)) / theta1.
// Concave; equals E_C(theta2-link) at theta = theta1; crosses zero at theta_star.
double case_two_objective(const LinkParams& link1, const LinkParams& link2,
                          double theta1, double theta, double quad_tol) {
  return -(service_lmgf(link2, -theta, quad_tol) +
           service_lmgf(link1, theta - theta1, quad_tol)) /
         theta1;
}

}  // namespace

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::CaseI: return "CaseI";
    case CaseTag::CaseII_1: return "CaseII_1";
    case CaseTag::CaseII_2: return "CaseII_2";
    case CaseTag::Unstable: return "Unstable";
  }
  return "?";
}

bool check_stability(const LinkParams& link1, const LinkParams& link2,
                     const SolverOptions& opts) {
  const double rate1 = link1.fading.expectation(
      [&](double z) { return std::log2(1.0 + link1.snr * z); }, opts.quad_rel_tol);
  const double rate2 = link2.fading.expectation(
      [&](double z) { return std::log2(1.0 + link2.snr * z); }, opts.quad_rel_tol);
  return rate1 < rate2;
}

double solve_theta_tilde(const LinkParams& link1, double rate,
                         const SolverOptions& opts) {
  if (!(rate > 0.0)) throw std::domain_error("solve_theta_tilde: rate must be > 0");
  const double ergodic = ergodic_capacity(link1, opts.quad_rel_tol);
  if (rate >= ergodic) {
    throw NoSolution("solve_theta_tilde: rate >= ergodic capacity, no positive solution");
  }
  auto gap = [&](double theta) {
    return link_effective_capacity(link1, theta, opts.quad_rel_tol) - rate;
  };
  double lo = 1e-8;
  while (gap(lo) <= 0.0) {
    lo *= 0.1;
    if (lo < 1e-100) {
      throw NoSolution("solve_theta_tilde: rate indistinguishable from ergodic capacity");
    }
  }
  double hi = 1e-2;
  while (hi < opts.theta_cap && gap(hi) > 0.0) hi *= 2.0;
  if (gap(hi) > 0.0) return kInf;  // constraint never binds below the cap
  return bisect_root(gap, lo, hi, opts.root_rel_tol);
}

double solve_theta_hat(const LinkParams& link1, const LinkParams& link2,
                       double rate, double theta_tilde, const SolverOptions& opts) {
  if (!(rate > 0.0)) throw std::domain_error("solve_theta_hat: rate must be > 0");
  auto f = [&](double theta) {
    return departure_lmgf(link1, rate, theta_tilde, theta, opts.quad_rel_tol) +
           service_lmgf(link2, -theta, opts.quad_rel_tol);
  };
  double lo = 1e-8;
  if (f(lo) > 0.0) {
    throw NoSolution("solve_theta_hat: relay queue unstable at this rate");
  }
  double hi = 1e-2;
  while (hi < opts.theta_cap && f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (f(hi) < 0.0) return kInf;  // relay constraint slack everywhere probed
  return bisect_root(f, lo, hi, opts.root_rel_tol);
}

double crossing_theta_star(const LinkParams& link1, const LinkParams& link2,
                           double theta1, const SolverOptions& opts) {
  if (!(theta1 > 0.0)) throw std::domain_error("crossing_theta_star: theta1 must be > 0");
  auto diff = [&](double theta) {
    return link_effective_capacity(link2, theta, opts.quad_rel_tol) -
           virtual_effective_bandwidth(link1, theta, theta1, opts.quad_rel_tol);
  };
  double lo = theta1;  // E_B vanishes there, E_C > 0
  double hi = std::max(2.0 * theta1, 1e-2);
  while (hi < opts.theta_cap && diff(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (diff(hi) > 0.0) {
    throw NoSolution(
        "crossing_theta_star: no crossing below cap; the second hop's virtual "
        "effective capacity dominates the first hop's virtual effective bandwidth");
  }
  return bisect_root(diff, lo, hi, opts.root_rel_tol);
}

CaseTwoGeometry analyze_case_two(const LinkParams& link1, const LinkParams& link2,
                                 double theta1, const SolverOptions& opts) {
  CaseTwoGeometry geom;
  const double e1_at_theta1 =
      link_effective_capacity(link1, theta1, opts.quad_rel_tol);
  auto j = [&](double theta) {
    return case_two_objective(link1, link2, theta1, theta, opts.quad_rel_tol);
  };

  double theta_star = kInf;
  try {
    theta_star = crossing_theta_star(link1, link2, theta1, opts);
    geom.theta_star = theta_star;
  } catch (const NoSolution&) {
    // No crossing: J never returns to zero, so it is nondecreasing and the
    // flat region is all-or-nothing.
    for (double t = theta1; t <= opts.theta_cap; t *= 2.0) {
      if (j(t) >= e1_at_theta1) {
        geom.theta2_prime = kInf;
        return geom;
      }
    }
    geom.theta2_prime = 0.0;
    return geom;
  }

  // Candidates for max J on [theta1, theta_star]: the boundary theta1 and an
  // interior stationary point located on a central-difference derivative.
  auto dj = [&](double t) {
    const double h = 1e-6 * t;
    return (j(t + h) - j(t - h)) / (2.0 * h);
  };
  double arg_max = theta1;
  double j_max = link_effective_capacity(link2, theta1, opts.quad_rel_tol);  // J(theta1)
  if (dj(theta1) > 0.0) {
    if (dj(theta_star) >= 0.0) {
      arg_max = theta_star;
      j_max = j(theta_star);
    } else {
      const double tss = bisect_root(dj, theta1, theta_star, opts.root_rel_tol);
      geom.theta_star_star = tss;
      arg_max = tss;
      j_max = j(tss);
    }
  }

  if (j_max < e1_at_theta1) {
    geom.theta2_prime = 0.0;  // flat region empty
    return geom;
  }
  geom.theta2_prime = bisect_root(
      [&](double t) { return j(t) - e1_at_theta1; }, arg_max, theta_star,
      opts.root_rel_tol);
  return geom;
}

double theta2_prime(const LinkParams& link1, const LinkParams& link2,
                    double theta1, const SolverOptions& opts) {
  return analyze_case_two(link1, link2, theta1, opts).theta2_prime;
}

double theta_tilde_0(const LinkParams& link1, const LinkParams& link2,
                     double theta1, double theta2, const SolverOptions& opts) {
  if (!(theta1 > 0.0) || !(theta2 > theta1)) {
    throw std::domain_error("theta_tilde_0: need 0 < theta1 < theta2");
  }
  const double lambda2_neg = service_lmgf(link2, -theta2, opts.quad_rel_tol);
  auto second_term = [&](double t) {
    return -(lambda2_neg + service_lmgf(link1, theta2 - t, opts.quad_rel_tol)) / t;
  };
  auto balance = [&](double t) {
    return link_effective_capacity(link1, t, opts.quad_rel_tol) - second_term(t);
  };
  // First term decreasing, second increasing: at most one interior crossing.
  if (balance(theta2) >= 0.0) return theta2;  // boundary wins the sup-min
  if (balance(theta1) <= 0.0) return theta1;  // only at the II-1 boundary edge
  return bisect_root(balance, theta1, theta2, opts.root_rel_tol);
}

EffCapResult effective_capacity(const LinkParams& link1, const LinkParams& link2,
                                const QosPair& qos, const SolverOptions& opts,
                                const CaseTwoGeometry* geometry) {
  EffCapResult result;
  if (!check_stability(link1, link2, opts)) {
    result.case_tag = CaseTag::Unstable;
    result.r_e = 0.0;
    result.theta_tilde = kNaN;
    result.theta_hat = kNaN;
    return result;
  }

  if (qos.theta1 >= qos.theta2) {
    result.case_tag = CaseTag::CaseI;
    const double e1 = link_effective_capacity(link1, qos.theta1, opts.quad_rel_tol);
    const double e2 = link_effective_capacity(link2, qos.theta2, opts.quad_rel_tol);
    result.r_e = std::min(e1, e2);
  } else {
    const CaseTwoGeometry geom =
        geometry ? *geometry : analyze_case_two(link1, link2, qos.theta1, opts);
    result.theta_star = geom.theta_star;
    result.theta_star_star = geom.theta_star_star;
    result.theta2_prime = geom.theta2_prime;
    if (qos.theta2 <= geom.theta2_prime) {
      result.case_tag = CaseTag::CaseII_1;
      result.r_e = link_effective_capacity(link1, qos.theta1, opts.quad_rel_tol);
    } else {
      result.case_tag = CaseTag::CaseII_2;
      const double t0 = theta_tilde_0(link1, link2, qos.theta1, qos.theta2, opts);
      result.theta_tilde_0 = t0;
      if (t0 == qos.theta2) {
        // Boundary optimum: both exponents pinned at theta2.
        result.r_e =
            std::min(link_effective_capacity(link1, qos.theta2, opts.quad_rel_tol),
                     link_effective_capacity(link2, qos.theta2, opts.quad_rel_tol));
      } else {
        result.r_e = link_effective_capacity(link1, t0, opts.quad_rel_tol);
      }
    }
  }
  result.r_e = std::max(result.r_e, 0.0);

  if (result.r_e > 0.0) {
    const double inner_rate = result.r_e * (1.0 - 1e-9);
    result.theta_tilde = solve_theta_tilde(link1, inner_rate, opts);
    result.theta_hat =
        solve_theta_hat(link1, link2, inner_rate, result.theta_tilde, opts);
  } else {
    result.theta_tilde = kNaN;
    result.theta_hat = kNaN;
  }
  return result;
}

}  // namespace effcap
