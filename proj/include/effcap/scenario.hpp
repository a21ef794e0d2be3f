#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "effcap/lmgf.hpp"
#include "effcap/simulator.hpp"
#include "effcap/solver.hpp"

namespace effcap {

struct SweepSpec {
  enum class Var { Theta2, Snr2Db, Theta };
  Var var;
  double lo, hi;
  int points;
  bool log_spaced;

  // "theta2:1e-4:1:50:log" | "snr2_db:0:20:9:lin" | "theta:0.01:1:200:log"
  static SweepSpec parse(const std::string& text);
  std::vector<double> grid() const;
};

// One CLI/config invocation: link pair, QoS pair, optional sweep and
// simulation settings. Defaults reproduce the reference Rayleigh setup
// (T = 2 ms, B = 1e5 Hz, theta1 = 0.01, SNR = 0 dB / 10 dB).
struct Scenario {
  double theta1 = 0.01;
  double theta2 = 0.01;
  double snr1_db = 0.0;
  double snr2_db = 10.0;
  double block_s = 0.002;
  double bandwidth_hz = 1e5;
  std::string fading1 = "rayleigh:1";
  std::string fading2 = "rayleigh:1";
  std::optional<SweepSpec> sweep;
  double rate_frac = 0.999;        // simulated R as a fraction of r_e
  std::uint64_t blocks = 1000000;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> thresholds;
  double warmup_frac = 0.01;
  bool single_queue = false;
  int replications = 1;
  double margin = 0.9;             // slope acceptance factor against theta
  std::string format = "csv";      // "csv" | "json"
  double tol = 1e-9;               // root-finding tolerance

  static Scenario from_json(const nlohmann::json& j);

  LinkParams link1() const;
  LinkParams link2() const;
  QosPair qos() const;
  SolverOptions solver_options() const;
  double snr1() const { return std::pow(10.0, snr1_db / 10.0); }
  double snr2() const { return std::pow(10.0, snr2_db / 10.0); }
};

// "5:5000:16:log" or a comma list "100,200,400".
std::vector<double> parse_thresholds(const std::string& text);

// Subcommand bodies; each returns the full stdout payload and is
// deterministic given the scenario.
std::string run_compute(const Scenario& sc);
std::string run_curves(const Scenario& sc);
std::string run_sweep(const Scenario& sc);
std::string run_simulate(const Scenario& sc);

// "%.12g" with stable inf/nan spelling.
std::string format_double(double v);

}  // namespace effcap
