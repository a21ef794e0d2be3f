#include <doctest.h>

#include <cmath>

#include "effcap/solver.hpp"
#include "reference_values.hpp"

using namespace effcap;

namespace {

// Deterministic link delivering exactly c bits per block (tb = 200).
LinkParams det_link(double c_bits) {
  const double z0 = std::pow(2.0, c_bits / 200.0) - 1.0;
  return LinkParams(1.0, 0.002, 1e5, FadingDistribution::constant(z0));
}

LinkParams rayleigh_link(double snr) {
  return LinkParams(snr, 0.002, 1e5, FadingDistribution::rayleigh(1.0));
}

const double kSnr10 = 10.0;  // 10 dB

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("stability requires a strictly faster second hop") {
  CHECK(check_stability(rayleigh_link(1.0), rayleigh_link(kSnr10)));
  CHECK_FALSE(check_stability(rayleigh_link(1.0), rayleigh_link(1.0)));
  CHECK_FALSE(check_stability(rayleigh_link(kSnr10), rayleigh_link(1.0)));
  CHECK(check_stability(det_link(200.0), det_link(300.0)));
}

TEST_CASE("theta_tilde inverts the effective capacity") {
  const LinkParams link = rayleigh_link(1.0);
  const double rate = link_effective_capacity(link, 0.02);
  CHECK(solve_theta_tilde(link, rate) == doctest::Approx(0.02).epsilon(5e-9));
  CHECK(solve_theta_tilde(link, refvals::kEffCapSnr1Theta001) ==
        doctest::Approx(0.01).epsilon(1e-7));
}

TEST_CASE("theta_tilde corner cases") {
  CHECK(std::isinf(solve_theta_tilde(det_link(200.0), 100.0)));
  CHECK_THROWS_AS(solve_theta_tilde(det_link(200.0), 200.0), NoSolution);
  CHECK_THROWS_AS(solve_theta_tilde(rayleigh_link(1.0), refvals::kErgodicSnr1 * 1.01),
                  NoSolution);
  CHECK_THROWS_AS(solve_theta_tilde(rayleigh_link(1.0), 0.0), std::domain_error);
  CHECK_THROWS_AS(solve_theta_tilde(rayleigh_link(1.0), -5.0), std::domain_error);
}

TEST_CASE("theta_hat: relay never congested on a fast deterministic hop") {
  // f(theta) stays negative: linear branch slope 100-300, beyond the kink 200-300.
  const double theta_tilde = solve_theta_tilde(det_link(200.0), 100.0);
  CHECK(std::isinf(theta_tilde));
  CHECK(std::isinf(solve_theta_hat(det_link(200.0), det_link(300.0), 100.0, theta_tilde)));
}

TEST_CASE("theta_hat: symmetric tandem pins both exponents") {
  const LinkParams link = rayleigh_link(1.0);
  const double rate = link_effective_capacity(link, 0.02);
  const double tt = solve_theta_tilde(link, rate);
  CHECK(solve_theta_hat(link, link, rate, tt) == doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("theta_hat: rate above the second hop's ergodic capacity") {
  CHECK_THROWS_AS(
      solve_theta_hat(rayleigh_link(kSnr10), rayleigh_link(1.0), 175.0, 0.05),
      NoSolution);
}

TEST_CASE("crossing point on deterministic links") {
  // E_C = c2 constant, E_B = (1 - theta1/theta) c1
  CHECK(crossing_theta_star(det_link(200.0), det_link(100.0), 0.01) ==
        doctest::Approx(0.02).epsilon(1e-9));
  CHECK(crossing_theta_star(det_link(200.0), det_link(150.0), 0.01) ==
        doctest::Approx(0.04).epsilon(1e-9));
  CHECK_THROWS_AS(crossing_theta_star(det_link(200.0), det_link(300.0), 0.01),
                  NoSolution);
}

TEST_CASE("crossing point at the reference setup") {
  CHECK(crossing_theta_star(rayleigh_link(1.0), rayleigh_link(kSnr10), 0.01) ==
        doctest::Approx(refvals::kThetaStar).epsilon(1e-7));
}

TEST_CASE("theta2_prime reference values and snr monotonicity") {
  const LinkParams l1 = rayleigh_link(1.0);
  const double tp5 = theta2_prime(l1, rayleigh_link(std::pow(10.0, 0.5)), 0.01);
  const double tp10 = theta2_prime(l1, rayleigh_link(kSnr10), 0.01);
  const double tp15 = theta2_prime(l1, rayleigh_link(std::pow(10.0, 1.5)), 0.01);
  CHECK(tp5 == doctest::Approx(refvals::kTheta2Prime5db).epsilon(1e-7));
  CHECK(tp10 == doctest::Approx(refvals::kTheta2Prime10db).epsilon(1e-7));
  CHECK(tp15 == doctest::Approx(refvals::kTheta2Prime15db).epsilon(1e-7));
  CHECK(tp5 < tp10);
  CHECK(tp10 < tp15);
}

TEST_CASE("theta2_prime equals the relay root at the source-limited rate") {
  // With R = source effective capacity at theta1 (so theta_tilde = theta1),
  // the flat-region boundary is exactly the positive root of
  // departure_lmgf + Lambda2(-theta): both are "largest theta2 satisfying
  // the relay constraint".
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  const double e1 = link_effective_capacity(l1, 0.01);
  const double root = solve_theta_hat(l1, l2, e1, 0.01);
  CHECK(theta2_prime(l1, l2, 0.01) == doctest::Approx(root).epsilon(1e-6));
}

TEST_CASE("theta2_prime on deterministic links") {
  // c2 < c1: the case-II objective tops out at c2 < c1, flat region empty.
  CHECK(theta2_prime(det_link(200.0), det_link(150.0), 0.01) == 0.0);
  // c2 > c1: the objective grows without bound, relay never binds.
  CHECK(std::isinf(theta2_prime(det_link(200.0), det_link(300.0), 0.01)));
}

TEST_CASE("theta_tilde_0 reference and boundary behaviour") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  CHECK(theta_tilde_0(l1, l2, 0.01, 5.0) ==
        doctest::Approx(refvals::kThetaTilde0Qos5).epsilon(1e-6));
  // Deterministic bottleneck: the balance equation has no interior solution
  // and the boundary theta2 wins the sup-min.
  CHECK(theta_tilde_0(det_link(200.0), det_link(150.0), 0.01, 0.1) == 0.1);
  CHECK_THROWS_AS(theta_tilde_0(l1, l2, 0.02, 0.01), std::domain_error);
}

TEST_CASE("effective capacity of deterministic tandems") {
  for (double theta2 : {0.001, 0.01, 0.05}) {
    const EffCapResult res =
        effective_capacity(det_link(200.0), det_link(400.0), QosPair(0.01, theta2));
    CHECK(res.r_e == doctest::Approx(200.0).epsilon(1e-9));
    CHECK(res.case_tag == (theta2 <= 0.01 ? CaseTag::CaseI : CaseTag::CaseII_1));
  }
  // A slower deterministic relay trips the stability gate outright.
  const EffCapResult res =
      effective_capacity(det_link(200.0), det_link(150.0), QosPair(0.01, 0.001));
  CHECK(res.case_tag == CaseTag::Unstable);
  CHECK(res.r_e == 0.0);
}

TEST_CASE("case I with a binding discrete relay") {
  // Relay atoms worth 100/400 bits: ergodic 250 > 200 keeps the queues
  // stable while E2(theta2) sinks toward the 100-bit floor.
  const LinkParams l1 = det_link(200.0);
  const LinkParams l2(1.0, 0.002, 1e5,
                      FadingDistribution::discrete({{std::pow(2.0, 0.5) - 1.0, 0.5},
                                                    {3.0, 0.5}}));
  const double theta2 = 0.05;
  const double e2 =
      -std::log(0.5 * std::exp(-theta2 * 100.0) + 0.5 * std::exp(-theta2 * 400.0)) /
      theta2;
  REQUIRE(e2 < 200.0);
  const EffCapResult res = effective_capacity(l1, l2, QosPair(0.06, theta2));
  CHECK(res.case_tag == CaseTag::CaseI);
  CHECK(res.r_e == doctest::Approx(e2).epsilon(1e-9));
  CHECK(std::isinf(res.theta_tilde));
  CHECK(res.theta_hat >= theta2 * (1.0 - 1e-9));
}

TEST_CASE("case I at the reference setup") {
  const EffCapResult res = effective_capacity(rayleigh_link(1.0), rayleigh_link(kSnr10),
                                              QosPair(0.01, 0.001));
  CHECK(res.case_tag == CaseTag::CaseI);
  CHECK(res.r_e == doctest::Approx(refvals::kEffCapSnr1Theta001).epsilon(1e-8));
}

TEST_CASE("case I no-harm: better relay under a looser constraint") {
  for (double snr1_db : {0.0, 5.0}) {
    const double snr1 = std::pow(10.0, snr1_db / 10.0);
    const double snr2 = std::pow(10.0, (snr1_db + 5.0) / 10.0);
    for (double ratio : {0.1, 0.5, 1.0}) {
      const EffCapResult res = effective_capacity(
          rayleigh_link(snr1), rayleigh_link(snr2), QosPair(0.01, 0.01 * ratio));
      const double source_only = link_effective_capacity(rayleigh_link(snr1), 0.01);
      CHECK(res.r_e == doctest::Approx(source_only).epsilon(1e-9));
    }
  }
}

TEST_CASE("unstable ordering yields zero") {
  const EffCapResult res = effective_capacity(rayleigh_link(kSnr10), rayleigh_link(1.0),
                                              QosPair(0.01, 0.01));
  CHECK(res.case_tag == CaseTag::Unstable);
  CHECK(res.r_e == 0.0);
}

TEST_CASE("case II regions at the reference setup") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  const double e1 = link_effective_capacity(l1, 0.01);

  const EffCapResult flat = effective_capacity(l1, l2, QosPair(0.01, 0.015));
  CHECK(flat.case_tag == CaseTag::CaseII_1);
  CHECK(flat.r_e == doctest::Approx(e1).epsilon(1e-12));
  CHECK(flat.theta2_prime.has_value());
  CHECK(*flat.theta2_prime == doctest::Approx(refvals::kTheta2Prime10db).epsilon(1e-7));
  CHECK(flat.theta_star.has_value());

  const EffCapResult steep = effective_capacity(l1, l2, QosPair(0.01, 1.0));
  CHECK(steep.case_tag == CaseTag::CaseII_2);
  CHECK(steep.r_e == doctest::Approx(refvals::kRateQos1).epsilon(1e-6));

  const EffCapResult steeper = effective_capacity(l1, l2, QosPair(0.01, 5.0));
  CHECK(steeper.case_tag == CaseTag::CaseII_2);
  CHECK(steeper.r_e == doctest::Approx(refvals::kRateQos5).epsilon(1e-6));
  CHECK(steeper.theta_tilde_0.has_value());
  CHECK(*steeper.theta_tilde_0 == doctest::Approx(refvals::kThetaTilde0Qos5).epsilon(1e-6));
}

TEST_CASE("r_e is bounded by and decreasing from the source-only value") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  const double cap = link_effective_capacity(l1, 0.01);
  double prev = cap * (1.0 + 1e-12);
  for (double theta2 = 1e-4; theta2 <= 1.0 + 1e-12; theta2 *= std::pow(10.0, 0.5)) {
    const EffCapResult res = effective_capacity(l1, l2, QosPair(0.01, theta2));
    CHECK(res.r_e <= cap * (1.0 + 1e-9));
    CHECK(res.r_e <= prev * (1.0 + 1e-9));
    prev = res.r_e;
  }
}

TEST_CASE("r_e is nonincreasing in theta1") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  double prev = 1e300;
  for (double theta1 : {0.005, 0.01, 0.02, 0.05}) {
    const EffCapResult res = effective_capacity(l1, l2, QosPair(theta1, 0.03));
    CHECK(res.r_e <= prev * (1.0 + 1e-9));
    prev = res.r_e;
  }
}

TEST_CASE("continuity across both case boundaries") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  const double theta1 = 0.01;
  const double tp = theta2_prime(l1, l2, theta1);
  for (double pivot : {theta1, tp}) {
    const double lo = effective_capacity(l1, l2, QosPair(theta1, pivot * (1 - 1e-6))).r_e;
    const double hi = effective_capacity(l1, l2, QosPair(theta1, pivot * (1 + 1e-6))).r_e;
    CHECK(std::fabs(lo - hi) <= 1e-5 * std::max(lo, hi));
  }
}

TEST_CASE("solved exponents satisfy both constraints with margin") {
  const LinkParams l1 = rayleigh_link(1.0);
  const LinkParams l2 = rayleigh_link(kSnr10);
  for (double theta2 : {0.001, 0.015, 0.05, 0.5}) {
    const EffCapResult res = effective_capacity(l1, l2, QosPair(0.01, theta2));
    REQUIRE(res.r_e > 0.0);
    CHECK(res.theta_tilde >= 0.01 * (1.0 - 1e-6));
    CHECK(res.theta_hat >= theta2 * (1.0 - 1e-6));
    // round trip through the defining equations at a slightly interior rate
    const double rate = res.r_e * (1.0 - 1e-6);
    CHECK(solve_theta_tilde(l1, rate) >= 0.01 * (1.0 - 1e-5));
    const double tt = solve_theta_tilde(l1, rate);
    CHECK(solve_theta_hat(l1, l2, rate, tt) >= theta2 * (1.0 - 1e-5));
  }
}

}  // TEST_SUITE
