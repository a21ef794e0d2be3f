#include "effcap/lmgf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace effcap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThetaZeroBranch = 1e-12;
}  // namespace

LinkParams::LinkParams(double snr_, double block_s_, double bandwidth_hz_,
                       FadingDistribution fading_)
    : snr(snr_), block_s(block_s_), bandwidth_hz(bandwidth_hz_),
      fading(std::move(fading_)) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("link: snr must be positive");
  }
  if (!(block_s > 0.0) || !std::isfinite(block_s)) {
    throw std::invalid_argument("link: block_s must be positive");
  }
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
    throw std::invalid_argument("link: bandwidth_hz must be positive");
  }
}

double LinkParams::bits_per_block(double z) const {
  return tb() * std::log2(1.0 + snr * z);
}

QosPair::QosPair(double t1, double t2) : theta1(t1), theta2(t2) {
  if (!(theta1 > 0.0) || !std::isfinite(theta1)) {
    throw std::invalid_argument("qos: theta1 must be positive and finite");
  }
  if (!(theta2 > 0.0) || !std::isfinite(theta2)) {
    throw std::invalid_argument("qos: theta2 must be positive and finite");
  }
}

double service_lmgf(const LinkParams& link, double theta, double rel_tol) {
  if (!std::isfinite(theta)) throw std::domain_error("service_lmgf: theta not finite");
  if (theta == 0.0) return 0.0;
  // e^{theta c(z)} = (1 + snr z)^{theta TB / ln 2}
  const double beta = theta * link.tb() / std::numbers::ln2;
  const double snr = link.snr;
  return link.fading.log_expectation_exp(
      [beta, snr](double z) { return beta * std::log1p(snr * z); }, rel_tol);
}

double link_effective_capacity(const LinkParams& link, double theta, double rel_tol) {
  if (!(theta > 0.0)) throw std::domain_error("effective capacity: theta must be > 0");
  if (theta < kThetaZeroBranch) return ergodic_capacity(link, rel_tol);
  return -service_lmgf(link, -theta, rel_tol) / theta;
}

double virtual_effective_bandwidth(const LinkParams& link1, double theta,
                                   double theta1, double rel_tol) {
  if (!(theta1 > 0.0)) throw std::domain_error("veb: theta1 must be > 0");
  if (theta < theta1) throw std::domain_error("veb: theta must be >= theta1");
  // service_lmgf(., 0) == 0 exactly, so theta == theta1 yields exactly 0.
  return service_lmgf(link1, theta - theta1, rel_tol) / theta;
}

double departure_lmgf(const LinkParams& link1, double rate, double theta_tilde,
                      double theta, double rel_tol) {
  if (theta < 0.0) throw std::domain_error("departure_lmgf: theta must be >= 0");
  if (!(theta_tilde > 0.0)) {
    throw std::domain_error("departure_lmgf: theta_tilde must be > 0");
  }
  if (theta <= theta_tilde) return rate * theta;
  return rate * theta_tilde + service_lmgf(link1, theta - theta_tilde, rel_tol);
}

double ergodic_capacity(const LinkParams& link, double rel_tol) {
  return link.fading.expectation(
      [&link](double z) { return link.bits_per_block(z); }, rel_tol);
}

double delay_limited_capacity(const LinkParams& link) {
  return link.bits_per_block(link.fading.min_gain());
}

double peak_rate(const LinkParams& link) {
  const double zmax = link.fading.max_gain();
  return std::isfinite(zmax) ? link.bits_per_block(zmax) : kInf;
}

}  // namespace effcap
