#include "effcap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "effcap/rng.hpp"

namespace effcap {

void SimConfig::validate() const {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
    throw std::invalid_argument("sim: arrival_rate must be positive");
  }
  if (num_blocks == 0) throw std::invalid_argument("sim: num_blocks must be positive");
  if (warmup_blocks >= num_blocks) {
    throw std::invalid_argument("sim: warmup_blocks must be below num_blocks");
  }
  if (thresholds.empty()) throw std::invalid_argument("sim: thresholds required");
  double prev = 0.0;
  for (double q : thresholds) {
    if (!(q > prev)) {
      throw std::invalid_argument("sim: thresholds must be positive and strictly ascending");
    }
    prev = q;
  }
}

namespace {

// Exceedance tallies via a histogram over threshold bins: bin k counts blocks
// whose queue lands in (q_{k-1}, q_k]; suffix sums give P(Q > q_k).
struct Tally {
  explicit Tally(std::size_t n_thresholds) : bins(n_thresholds + 1, 0) {}

  void record(std::span<const double> q, double value) {
    // idx = number of thresholds strictly below value; ties do not count as
    // overflow, matching the strict inequality in P(Q > q).
    const std::size_t idx =
        std::lower_bound(q.begin(), q.end(), value) - q.begin();
    bins[idx] += 1;
    sum += value;
  }

  std::vector<std::uint64_t> bins;
  double sum = 0.0;
};

QueueCurve finish(const Tally& tally, std::uint64_t counted) {
  QueueCurve curve;
  const std::size_t n = tally.bins.size() - 1;
  curve.overflow_prob.resize(n);
  std::uint64_t exceed = 0;
  for (std::size_t k = n; k-- > 0;) {
    exceed += tally.bins[k + 1];
    curve.overflow_prob[k] = static_cast<double>(exceed) / counted;
  }
  curve.time_avg_len = tally.sum / counted;
  return curve;
}

}  // namespace

SimResult run(const SimConfig& config) {
  config.validate();

  CounterRng rng1(config.seed, 1);
  CounterRng rng2(config.seed, 2);

  const std::span<const double> q(config.thresholds);
  Tally tally1(q.size());
  Tally tally2(q.size());

  double q1 = 0.0, q2 = 0.0;
  double d1_prev = 0.0;  // source departures become relay arrivals next block
  double d1_total = 0.0, d2_total = 0.0;
  const double rate = config.arrival_rate;

  for (std::uint64_t i = 0; i < config.num_blocks; ++i) {
    const double c1 = config.link1.bits_per_block(config.link1.fading.sample(rng1));
    const double d1 = std::min(q1 + rate, c1);
    q1 += rate - d1;

    double d2 = 0.0;
    if (config.single_queue) {
      d2 = d1_prev;  // infinitely fast second hop
    } else {
      const double c2 = config.link2.bits_per_block(config.link2.fading.sample(rng2));
      const double backlog = q2 + d1_prev;
      d2 = std::min(backlog, c2);
      q2 = backlog - d2;
    }
    d1_prev = d1;

    if (i >= config.warmup_blocks) {
      tally1.record(q, q1);
      tally2.record(q, q2);
      d1_total += d1;
      d2_total += d2;
    }
  }

  SimResult result;
  result.thresholds = config.thresholds;
  result.counted_blocks = config.num_blocks - config.warmup_blocks;
  result.source = finish(tally1, result.counted_blocks);
  result.relay = finish(tally2, result.counted_blocks);
  result.source_departure_rate = d1_total / result.counted_blocks;
  result.relay_departure_rate = d2_total / result.counted_blocks;

  const double erg1 = ergodic_capacity(config.link1);
  const double erg2 = config.single_queue
                          ? std::numeric_limits<double>::infinity()
                          : ergodic_capacity(config.link2);
  result.stability_warning = rate >= erg1 || std::min(rate, erg1) >= erg2;
  return result;
}

std::vector<SimResult> run_replicated(const SimConfig& config, int replications) {
  if (replications < 1) throw std::invalid_argument("sim: replications must be >= 1");
  std::vector<std::future<SimResult>> futures;
  futures.reserve(replications);
  for (int r = 0; r < replications; ++r) {
    SimConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    futures.push_back(std::async(std::launch::async, [c] { return run(c); }));
  }
  std::vector<SimResult> results;
  results.reserve(replications);
  for (auto& f : futures) results.push_back(f.get());  // fixed merge order
  return results;
}

DecayFit fit_decay_curve(std::span<const double> thresholds,
                         std::span<const double> probs) {
  if (thresholds.size() != probs.size()) {
    throw std::invalid_argument("fit_decay_curve: size mismatch");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (probs[i] >= 1e-5 && probs[i] <= 1e-1) {
      x.push_back(thresholds[i]);
      y.push_back(std::log(probs[i]));
    }
  }
  const int n = static_cast<int>(x.size());
  if (n < 4) {
    throw InsufficientData(
        "fit_decay_curve: only " + std::to_string(n) +
            " thresholds have overflow probability in [1e-5, 1e-1]; need 4",
        n);
  }
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = y[i] - my - slope * (x[i] - mx);
    sse += resid * resid;
  }
  const double se = std::sqrt(std::max(sse, 0.0) / (n - 2) / sxx);
  return DecayFit{-slope, se, n};
}

DecayFit estimate_decay(const SimResult& result, QueueId queue) {
  const QueueCurve& curve = queue == QueueId::Source ? result.source : result.relay;
  return fit_decay_curve(result.thresholds, curve.overflow_prob);
}

DecayFit pool_fits(std::span<const DecayFit> fits) {
  if (fits.empty()) throw std::invalid_argument("pool_fits: no fits");
  double wsum = 0.0, swsum = 0.0;
  int points = 0;
  for (const auto& f : fits) {
    const double w = 1.0 / (f.std_error * f.std_error);
    wsum += w;
    swsum += w * f.slope;
    points += f.points_used;
  }
  const double pooled = swsum / wsum;
  double scatter = 0.0;
  for (const auto& f : fits) {
    const double w = 1.0 / (f.std_error * f.std_error);
    scatter += w * (f.slope - pooled) * (f.slope - pooled);
  }
  double se = std::sqrt(1.0 / wsum);
  if (fits.size() > 1) {
    se = std::max(se, std::sqrt(scatter / (wsum * (fits.size() - 1))));
  }
  return DecayFit{pooled, se, points};
}

std::vector<double> default_thresholds(double tb) {
  const double scale = tb / 200.0;
  const double lo = 5.0 * scale, hi = 5000.0 * scale;
  std::vector<double> q(16);
  for (int i = 0; i < 16; ++i) {
    q[i] = lo * std::pow(hi / lo, i / 15.0);
  }
  return q;
}

}  // namespace effcap
