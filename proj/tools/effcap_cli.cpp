#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "effcap/scenario.hpp"

namespace {

struct Flags {
  std::optional<std::string> scenario_path;
  std::optional<double> theta1, theta2, snr1_db, snr2_db, block_s, bandwidth_hz;
  std::optional<std::string> fading1, fading2, sweep, thresholds, format;
  std::optional<double> rate_frac, warmup_frac, margin, tol;
  std::optional<std::uint64_t> blocks, seed;
  std::optional<int> replications;
  bool single_queue = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--scenario", f.scenario_path, "JSON scenario file; flags override it");
  sub->add_option("--theta1", f.theta1, "source QoS exponent, 1/bits");
  sub->add_option("--theta2", f.theta2, "relay QoS exponent, 1/bits");
  sub->add_option("--snr1-db", f.snr1_db, "first-hop SNR, dB");
  sub->add_option("--snr2-db", f.snr2_db, "second-hop SNR, dB");
  sub->add_option("--block-s", f.block_s, "fading block duration, s");
  sub->add_option("--bandwidth-hz", f.bandwidth_hz, "bandwidth, Hz");
  sub->add_option("--fading1", f.fading1, "rayleigh:<m> | constant:<z> | discrete:z@p,...");
  sub->add_option("--fading2", f.fading2, "second-hop fading law");
  sub->add_option("--sweep", f.sweep, "VAR:LO:HI:N:log|lin");
  sub->add_option("--rate-frac", f.rate_frac, "simulated rate as a fraction of r_e");
  sub->add_option("--blocks", f.blocks, "simulated blocks per replication");
  sub->add_option("--seed", f.seed, "base RNG seed");
  sub->add_option("--thresholds", f.thresholds, "LO:HI:N:log|lin or comma list, bits");
  sub->add_option("--warmup-frac", f.warmup_frac, "fraction of blocks discarded");
  sub->add_option("--replications", f.replications, "independent replications");
  sub->add_option("--margin", f.margin, "slope pass factor against theta");
  sub->add_option("--format", f.format, "csv | json");
  sub->add_option("--tol", f.tol, "root-finding relative tolerance");
  sub->add_flag("--single-queue", f.single_queue, "force the second hop infinitely fast");
}

effcap::Scenario build_scenario(const Flags& f) {
  effcap::Scenario sc;
  if (f.scenario_path) {
    std::ifstream in(*f.scenario_path);
    if (!in) throw std::invalid_argument("scenario: cannot open '" + *f.scenario_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("scenario: parse error in '" + *f.scenario_path +
                                  "': " + e.what());
    }
    sc = effcap::Scenario::from_json(j);
  }
  if (f.theta1) sc.theta1 = *f.theta1;
  if (f.theta2) sc.theta2 = *f.theta2;
  if (f.snr1_db) sc.snr1_db = *f.snr1_db;
  if (f.snr2_db) sc.snr2_db = *f.snr2_db;
  if (f.block_s) sc.block_s = *f.block_s;
  if (f.bandwidth_hz) sc.bandwidth_hz = *f.bandwidth_hz;
  if (f.fading1) sc.fading1 = *f.fading1;
  if (f.fading2) sc.fading2 = *f.fading2;
  if (f.sweep) sc.sweep = effcap::SweepSpec::parse(*f.sweep);
  if (f.rate_frac) sc.rate_frac = *f.rate_frac;
  if (f.blocks) sc.blocks = *f.blocks;
  if (f.seed) sc.seed = *f.seed;
  if (f.thresholds) sc.thresholds = effcap::parse_thresholds(*f.thresholds);
  if (f.warmup_frac) sc.warmup_frac = *f.warmup_frac;
  if (f.replications) sc.replications = *f.replications;
  if (f.margin) sc.margin = *f.margin;
  if (f.format) sc.format = *f.format;
  if (f.tol) sc.tol = *f.tol;
  if (f.single_queue) sc.single_queue = true;
  if (sc.format != "csv" && sc.format != "json") {
    throw std::invalid_argument("format: must be 'csv' or 'json'");
  }
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-hop effective capacity: Theorem-style solver, figure-ready "
               "sweeps, and a tandem-queue Monte Carlo validator"};
  app.require_subcommand(1);

  Flags flags;
  CLI::App* compute = app.add_subcommand(
      "compute", "effective capacity and every auxiliary exponent for one setup");
  CLI::App* curves = app.add_subcommand(
      "curves", "virtual effective capacity / bandwidth over a theta grid");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "r_e over theta2, or theta2_prime over snr2_db");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo overflow curves and decay-slope checks");
  for (CLI::App* sub : {compute, curves, sweep, simulate}) {
    add_common_options(sub, flags);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const effcap::Scenario sc = build_scenario(flags);
    if (compute->parsed()) {
      std::cout << effcap::run_compute(sc);
    } else if (curves->parsed()) {
      std::cout << effcap::run_curves(sc);
    } else if (sweep->parsed()) {
      std::cout << effcap::run_sweep(sc);
    } else if (simulate->parsed()) {
      std::cout << effcap::run_simulate(sc);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
