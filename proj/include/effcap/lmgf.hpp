#pragma once

#include "effcap/fading.hpp"

namespace effcap {

// One hop of the tandem link. Per-block service in bits is
// c(z) = T*B*log2(1 + snr*z) with z drawn fresh each block.
struct LinkParams {
  double snr;           // linear, > 0
  double block_s;       // T, seconds
  double bandwidth_hz;  // B, Hz
  FadingDistribution fading;

  LinkParams(double snr_, double block_s_, double bandwidth_hz_,
             FadingDistribution fading_);

  double tb() const { return block_s * bandwidth_hz; }
  double bits_per_block(double z) const;
};

struct QosPair {
  double theta1;  // source exponent, 1/bits
  double theta2;  // relay exponent, 1/bits

  QosPair(double t1, double t2);
};

// Log moment generating function of the per-block service,
// Lambda(theta) = log E_z{ e^{theta * c(z)} }  (positive-exponent convention).
// Finite for every real theta: the exponent grows only logarithmically in z.
double service_lmgf(const LinkParams& link, double theta, double rel_tol = 1e-10);

// -Lambda(-theta)/theta, bits per block; tends to the ergodic capacity as
// theta -> 0 (explicit branch below 1e-12, no 0/0 division).
double link_effective_capacity(const LinkParams& link, double theta,
                               double rel_tol = 1e-10);

// (1 - theta1/theta) * Lambda(theta - theta1) / (theta - theta1)
//   == Lambda(theta - theta1) / theta,
// which makes the removable singularity at theta == theta1 exact (value 0).
// Nondecreasing in theta; approaches the peak service rate as theta -> inf.
double virtual_effective_bandwidth(const LinkParams& link1, double theta,
                                   double theta1, double rel_tol = 1e-10);

// LMGF of the departures of a constant-rate-R queue served by link1:
//   R*theta                                   for 0 <= theta <= theta_tilde
//   R*theta_tilde + Lambda(theta-theta_tilde) for theta > theta_tilde
// theta_tilde may be +inf (deterministic service faster than R).
double departure_lmgf(const LinkParams& link1, double rate, double theta_tilde,
                      double theta, double rel_tol = 1e-10);

double ergodic_capacity(const LinkParams& link, double rel_tol = 1e-10);
double delay_limited_capacity(const LinkParams& link);  // theta -> inf limit
double peak_rate(const LinkParams& link);                // +inf for Rayleigh

}  // namespace effcap
