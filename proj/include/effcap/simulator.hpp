#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "effcap/lmgf.hpp"

namespace effcap {

// Block-level Monte Carlo of the two-queue fluid tandem. The source queue is
// fed at a constant rate R and drained by link1; its departures reach the
// relay queue one block later (store and forward) and are drained by link2.
struct SimConfig {
  LinkParams link1;
  LinkParams link2;
  double arrival_rate;              // R, bits per block
  std::uint64_t num_blocks;
  std::uint64_t seed;
  std::vector<double> thresholds;   // strictly ascending, bits
  std::uint64_t warmup_blocks;
  bool single_queue = false;        // force the second hop infinitely fast

  void validate() const;
};

struct QueueCurve {
  std::vector<double> overflow_prob;  // P(Q > q) per threshold, post warmup
  double time_avg_len = 0.0;          // bits
};

struct SimResult {
  std::vector<double> thresholds;
  QueueCurve source;
  QueueCurve relay;
  double source_departure_rate = 0.0;  // bits per block, post warmup
  double relay_departure_rate = 0.0;
  std::uint64_t counted_blocks = 0;
  bool stability_warning = false;
};

SimResult run(const SimConfig& config);

// Replication r uses seed + r; results come back in replication order.
std::vector<SimResult> run_replicated(const SimConfig& config, int replications);

enum class QueueId { Source, Relay };

struct DecayFit {
  double slope;      // 1/bits, negated regression slope
  double std_error;  // 1/bits
  int points_used;
};

class InsufficientData : public std::runtime_error {
 public:
  InsufficientData(const std::string& what, int usable)
      : std::runtime_error(what), usable_points(usable) {}
  int usable_points;
};

// OLS of log P(Q > q) on q restricted to probabilities in [1e-5, 1e-1];
// needs at least four usable thresholds.
DecayFit fit_decay_curve(std::span<const double> thresholds,
                         std::span<const double> probs);

DecayFit estimate_decay(const SimResult& result, QueueId queue);

// Inverse-variance pooling; the pooled error keeps the between-replication
// scatter when it exceeds the in-fit estimate.
DecayFit pool_fits(std::span<const DecayFit> fits);

// 16 log-spaced thresholds spanning [5, 5000] bits at tb = 200, rescaled.
std::vector<double> default_thresholds(double tb);

}  // namespace effcap
