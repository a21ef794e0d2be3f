#include <doctest.h>

#include <cmath>

#include "effcap/simulator.hpp"
#include "effcap/solver.hpp"
#include "reference_values.hpp"

using namespace effcap;

namespace {

LinkParams det_link(double c_bits) {
  const double z0 = std::pow(2.0, c_bits / 200.0) - 1.0;
  return LinkParams(1.0, 0.002, 1e5, FadingDistribution::constant(z0));
}

LinkParams rayleigh_link(double snr) {
  return LinkParams(1.0 * snr, 0.002, 1e5, FadingDistribution::rayleigh(1.0));
}

SimConfig base_config() {
  return SimConfig{det_link(200.0), det_link(300.0), 100.0, 1000, 1,
                   {100.0, 200.0, 400.0, 800.0}, 10, false};
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation") {
  SimConfig c = base_config();
  c.arrival_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = base_config();
  c.thresholds = {100.0, 100.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = base_config();
  c.warmup_blocks = c.num_blocks;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("service above arrivals keeps both queues empty") {
  const SimResult res = run(base_config());
  for (double p : res.source.overflow_prob) CHECK(p == 0.0);
  for (double p : res.relay.overflow_prob) CHECK(p == 0.0);
  CHECK(res.source.time_avg_len == 0.0);
  CHECK(res.relay.time_avg_len == 0.0);
  CHECK(res.source_departure_rate == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(res.relay_departure_rate == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_FALSE(res.stability_warning);
}

TEST_CASE("store-and-forward delays relay arrivals by one block") {
  // Dead second hop: the relay backlog after block i is i*R, because block
  // i's departures only enter the queue at the block boundary.
  SimConfig c = base_config();
  c.link2 = LinkParams(1.0, 0.002, 1e5, FadingDistribution::constant(0.0));
  c.num_blocks = 10;
  c.warmup_blocks = 0;
  const SimResult res = run(c);
  // queue samples: 0, 100, ..., 900 -> mean 450
  CHECK(res.relay.time_avg_len == doctest::Approx(450.0).epsilon(1e-12));
  CHECK(res.relay_departure_rate == 0.0);
  CHECK(res.stability_warning);
}

TEST_CASE("reruns are bit identical") {
  SimConfig c = base_config();
  c.link1 = rayleigh_link(1.0);
  c.link2 = rayleigh_link(10.0);
  c.arrival_rate = 80.0;
  c.num_blocks = 20000;
  const SimResult a = run(c);
  const SimResult b = run(c);
  CHECK(a.source.overflow_prob == b.source.overflow_prob);
  CHECK(a.relay.overflow_prob == b.relay.overflow_prob);
  CHECK(a.source.time_avg_len == b.source.time_avg_len);
  CHECK(a.source_departure_rate == b.source_departure_rate);

  SimConfig other = c;
  other.seed += 1;
  CHECK(run(other).source.time_avg_len != a.source.time_avg_len);
}

TEST_CASE("bits are conserved through the tandem") {
  SimConfig c = base_config();
  c.link1 = rayleigh_link(1.0);
  c.link2 = rayleigh_link(10.0);
  c.arrival_rate = 80.0;  // well inside both ergodic capacities
  c.num_blocks = 1000000;
  c.warmup_blocks = 0;
  const SimResult res = run(c);
  // departures can lag arrivals only by the residual queue contents
  CHECK(res.source_departure_rate <= c.arrival_rate * (1.0 + 1e-12));
  CHECK(res.source_departure_rate >= c.arrival_rate * (1.0 - 1e-3));
  CHECK(res.relay_departure_rate >= c.arrival_rate * (1.0 - 1e-3));
  CHECK(res.relay_departure_rate <= c.arrival_rate * (1.0 + 1e-12));
  // empirical overflow curves are nonincreasing in the threshold
  for (std::size_t i = 1; i < res.thresholds.size(); ++i) {
    CHECK(res.source.overflow_prob[i] <= res.source.overflow_prob[i - 1]);
    CHECK(res.relay.overflow_prob[i] <= res.relay.overflow_prob[i - 1]);
  }
}

TEST_CASE("decay fit recovers an exact exponential") {
  std::vector<double> q, p;
  for (int i = 1; i <= 8; ++i) {
    q.push_back(100.0 * i);
    p.push_back(std::exp(-0.01 * 100.0 * i));
  }
  const DecayFit fit = fit_decay_curve(q, p);
  CHECK(fit.slope == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(fit.std_error < 1e-12);
  CHECK(fit.points_used == 6);  // the first two sit above the 1e-1 window
}

TEST_CASE("decay fit demands enough usable points") {
  std::vector<double> q{10.0, 20.0, 30.0, 40.0};
  std::vector<double> p{0.9, 0.8, 0.7, 0.6};  // all above the window
  try {
    fit_decay_curve(q, p);
    FAIL("expected InsufficientData");
  } catch (const InsufficientData& e) {
    CHECK(e.usable_points == 0);
    CHECK(std::string(e.what()).find("only 0") != std::string::npos);
  }
}

TEST_CASE("single-queue run reproduces the solved exponent") {
  const LinkParams link = rayleigh_link(1.0);
  const double target = 0.02;
  const double rate = link_effective_capacity(link, target);
  std::vector<double> thresholds;
  for (int i = 0; i < 12; ++i) {
    thresholds.push_back(2.0 / target * std::pow(6.0, i / 11.0));
  }
  SimConfig c{link, link, rate, 2000000, 11, thresholds, 20000, true};
  const SimResult res = run(c);
  const DecayFit fit = estimate_decay(res, QueueId::Source);
  CHECK(fit.slope == doctest::Approx(target).epsilon(0.15));
  for (double p : res.relay.overflow_prob) CHECK(p == 0.0);
}

TEST_CASE("replications pool in replication order") {
  SimConfig c = base_config();
  c.link1 = rayleigh_link(1.0);
  c.link2 = rayleigh_link(10.0);
  c.arrival_rate = 100.0;
  c.num_blocks = 50000;
  const auto reps = run_replicated(c, 3);
  REQUIRE(reps.size() == 3);
  SimConfig manual = c;
  manual.seed = c.seed + 2;
  CHECK(reps[2].source.time_avg_len == run(manual).source.time_avg_len);
}

TEST_CASE("pooled fits blend inverse-variance and scatter") {
  const DecayFit a{0.010, 0.001, 6};
  const DecayFit b{0.020, 0.001, 6};
  const std::vector<DecayFit> fits{a, b};
  const DecayFit pooled = pool_fits(fits);
  CHECK(pooled.slope == doctest::Approx(0.015).epsilon(1e-12));
  CHECK(pooled.std_error >= 0.004);  // scatter dominates the nominal 0.0007
}

TEST_CASE("default thresholds scale with tb") {
  const auto q = default_thresholds(200.0);
  REQUIRE(q.size() == 16);
  CHECK(q.front() == doctest::Approx(5.0));
  CHECK(q.back() == doctest::Approx(5000.0));
  for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i] > q[i - 1]);
  CHECK(default_thresholds(400.0).front() == doctest::Approx(10.0));
}

}  // TEST_SUITE
