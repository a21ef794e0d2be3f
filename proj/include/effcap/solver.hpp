#pragma once

#include <optional>
#include <stdexcept>

#include "effcap/lmgf.hpp"

namespace effcap {

// A requested rate or crossing has no solution in the admissible range.
class NoSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseTag { CaseI, CaseII_1, CaseII_2, Unstable };

const char* to_string(CaseTag tag);

struct SolverOptions {
  double root_rel_tol = 1e-9;   // bisection interval shrinkage, relative
  double quad_rel_tol = 1e-10;  // expectation tolerance
  double theta_cap = 1e6;       // exponents beyond this count as +inf
};

struct EffCapResult {
  double r_e = 0.0;  // bits per block
  CaseTag case_tag = CaseTag::Unstable;
  double theta_tilde = 0.0;  // source exponent solved at R = r_e*(1-1e-9)
  double theta_hat = 0.0;    // relay exponent solved at the same rate; may be +inf
  std::optional<double> theta_star;       // E_C / E_B crossing
  std::optional<double> theta_star_star;  // interior stationary point, if any
  std::optional<double> theta2_prime;     // flat-region boundary (+inf possible)
  std::optional<double> theta_tilde_0;    // case II-2 balance point
};

// Geometry of the case-II objective J(theta) = -(Lambda2(-theta) +
// Lambda1(theta-theta1)) / theta1 over theta >= theta1. theta_star / the
// stationary point depend only on (link1, link2, theta1), never on theta2.
struct CaseTwoGeometry {
  std::optional<double> theta_star;
  std::optional<double> theta_star_star;
  double theta2_prime = 0.0;  // 0 when the flat region is empty; may be +inf
};

// Queues are jointly stable iff the first hop's ergodic rate is strictly
// below the second hop's.
bool check_stability(const LinkParams& link1, const LinkParams& link2,
                     const SolverOptions& opts = {});

// Solves link_effective_capacity(link1, theta) == rate. Returns +inf when the
// constraint never binds (deterministic service above the rate). Throws
// NoSolution for rate >= ergodic capacity, std::domain_error for rate <= 0.
double solve_theta_tilde(const LinkParams& link1, double rate,
                         const SolverOptions& opts = {});

// Positive root of departure_lmgf(theta) + Lambda2(-theta); +inf when the
// relay queue decays faster than every probed exponent.
double solve_theta_hat(const LinkParams& link1, const LinkParams& link2,
                       double rate, double theta_tilde,
                       const SolverOptions& opts = {});

// Unique crossing E_C(theta) == E_B(theta - theta1) beyond theta1.
double crossing_theta_star(const LinkParams& link1, const LinkParams& link2,
                           double theta1, const SolverOptions& opts = {});

CaseTwoGeometry analyze_case_two(const LinkParams& link1, const LinkParams& link2,
                                 double theta1, const SolverOptions& opts = {});

double theta2_prime(const LinkParams& link1, const LinkParams& link2,
                    double theta1, const SolverOptions& opts = {});

// Case II-2 balance point in [theta1, theta2]; returns theta2 when the
// boundary wins the sup-min.
double theta_tilde_0(const LinkParams& link1, const LinkParams& link2,
                     double theta1, double theta2, const SolverOptions& opts = {});

EffCapResult effective_capacity(const LinkParams& link1, const LinkParams& link2,
                                const QosPair& qos, const SolverOptions& opts = {},
                                const CaseTwoGeometry* geometry = nullptr);

}  // namespace effcap
