#include "effcap/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace effcap {

namespace {

double to_double_strict(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": bad number '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument(what + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

nlohmann::json json_value(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json json_value(const std::optional<double>& v) {
  return v ? json_value(*v) : nlohmann::json(nullptr);
}

std::string csv_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SweepSpec SweepSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 5) {
    throw std::invalid_argument("sweep: expected VAR:LO:HI:N:log|lin, got '" + text + "'");
  }
  SweepSpec spec{};
  if (parts[0] == "theta2") {
    spec.var = Var::Theta2;
  } else if (parts[0] == "snr2_db") {
    spec.var = Var::Snr2Db;
  } else if (parts[0] == "theta") {
    spec.var = Var::Theta;
  } else {
    throw std::invalid_argument("sweep: unknown variable '" + parts[0] + "'");
  }
  spec.lo = to_double_strict(parts[1], "sweep");
  spec.hi = to_double_strict(parts[2], "sweep");
  spec.points = static_cast<int>(to_double_strict(parts[3], "sweep"));
  if (parts[4] == "log") {
    spec.log_spaced = true;
  } else if (parts[4] == "lin") {
    spec.log_spaced = false;
  } else {
    throw std::invalid_argument("sweep: spacing must be 'log' or 'lin'");
  }
  if (spec.points < 1) throw std::invalid_argument("sweep: need at least 1 point");
  if (spec.points > 1 && !(spec.hi > spec.lo)) {
    throw std::invalid_argument("sweep: range must be ascending");
  }
  if (spec.log_spaced && !(spec.lo > 0.0)) {
    throw std::invalid_argument("sweep: log spacing needs a positive range");
  }
  return spec;
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    g[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  return g;
}

std::vector<double> parse_thresholds(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) {
      throw std::invalid_argument("thresholds: expected LO:HI:N:log|lin or a comma list");
    }
    const double lo = to_double_strict(parts[0], "thresholds");
    const double hi = to_double_strict(parts[1], "thresholds");
    const int n = static_cast<int>(to_double_strict(parts[2], "thresholds"));
    const bool log_spaced = parts[3] == "log";
    if (!log_spaced && parts[3] != "lin") {
      throw std::invalid_argument("thresholds: spacing must be 'log' or 'lin'");
    }
    if (n < 1 || !(lo > 0.0) || !(hi > lo)) {
      throw std::invalid_argument("thresholds: need 0 < LO < HI and N >= 1");
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      q[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return q;
  }
  std::vector<double> q;
  for (const auto& item : split(text, ',')) {
    q.push_back(to_double_strict(item, "thresholds"));
  }
  return q;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario sc;
  if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "theta1") {
        sc.theta1 = value.get<double>();
      } else if (key == "theta2") {
        sc.theta2 = value.get<double>();
      } else if (key == "snr1_db") {
        sc.snr1_db = value.get<double>();
      } else if (key == "snr2_db") {
        sc.snr2_db = value.get<double>();
      } else if (key == "block_s") {
        sc.block_s = value.get<double>();
      } else if (key == "bandwidth_hz") {
        sc.bandwidth_hz = value.get<double>();
      } else if (key == "fading1") {
        sc.fading1 = value.get<std::string>();
      } else if (key == "fading2") {
        sc.fading2 = value.get<std::string>();
      } else if (key == "sweep") {
        sc.sweep = SweepSpec::parse(value.get<std::string>());
      } else if (key == "rate_frac") {
        sc.rate_frac = value.get<double>();
      } else if (key == "blocks") {
        sc.blocks = value.get<std::uint64_t>();
      } else if (key == "seed") {
        sc.seed = value.get<std::uint64_t>();
      } else if (key == "thresholds") {
        if (value.is_string()) {
          sc.thresholds = parse_thresholds(value.get<std::string>());
        } else {
          sc.thresholds = value.get<std::vector<double>>();
        }
      } else if (key == "warmup_frac") {
        sc.warmup_frac = value.get<double>();
      } else if (key == "single_queue") {
        sc.single_queue = value.get<bool>();
      } else if (key == "replications") {
        sc.replications = value.get<int>();
      } else if (key == "margin") {
        sc.margin = value.get<double>();
      } else if (key == "format") {
        sc.format = value.get<std::string>();
      } else if (key == "tol") {
        sc.tol = value.get<double>();
      } else {
        throw std::invalid_argument("scenario: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("scenario: bad value for key '" + key + "'");
    }
  }
  if (sc.format != "csv" && sc.format != "json") {
    throw std::invalid_argument("scenario: format must be 'csv' or 'json'");
  }
  return sc;
}

LinkParams Scenario::link1() const {
  return LinkParams(snr1(), block_s, bandwidth_hz, FadingDistribution::parse(fading1));
}

LinkParams Scenario::link2() const {
  return LinkParams(snr2(), block_s, bandwidth_hz, FadingDistribution::parse(fading2));
}

QosPair Scenario::qos() const { return QosPair(theta1, theta2); }

SolverOptions Scenario::solver_options() const {
  SolverOptions opts;
  opts.root_rel_tol = tol;
  return opts;
}

std::string run_compute(const Scenario& sc) {
  const LinkParams l1 = sc.link1();
  const LinkParams l2 = sc.link2();
  const EffCapResult res = effective_capacity(l1, l2, sc.qos(), sc.solver_options());
  const double tb = l1.tb();

  if (sc.format == "json") {
    nlohmann::json out{
        {"case", to_string(res.case_tag)},
        {"r_e_bits_per_block", json_value(res.r_e)},
        {"r_e_norm", json_value(res.r_e / tb)},
        {"theta_tilde", json_value(res.theta_tilde)},
        {"theta_hat", json_value(res.theta_hat)},
        {"theta_star", json_value(res.theta_star)},
        {"theta_star_star", json_value(res.theta_star_star)},
        {"theta2_prime", json_value(res.theta2_prime)},
        {"theta_tilde_0", json_value(res.theta_tilde_0)},
    };
    return out.dump() + "\n";
  }

  std::string out =
      "case,r_e_bits_per_block,r_e_norm,theta_tilde,theta_hat,theta_star,"
      "theta_star_star,theta2_prime,theta_tilde_0\n";
  out += to_string(res.case_tag);
  out += "," + format_double(res.r_e);
  out += "," + format_double(res.r_e / tb);
  out += "," + format_double(res.theta_tilde);
  out += "," + format_double(res.theta_hat);
  out += "," + csv_opt(res.theta_star);
  out += "," + csv_opt(res.theta_star_star);
  out += "," + csv_opt(res.theta2_prime);
  out += "," + csv_opt(res.theta_tilde_0);
  out += "\n";
  return out;
}

std::string run_curves(const Scenario& sc) {
  SweepSpec spec{SweepSpec::Var::Theta, sc.theta1, 1.0, 200, true};
  if (sc.sweep) {
    if (sc.sweep->var != SweepSpec::Var::Theta) {
      throw std::invalid_argument("sweep: the curves command sweeps variable 'theta'");
    }
    spec = *sc.sweep;
  }
  if (spec.points < 2) throw std::invalid_argument("sweep: curves need at least 2 points");
  if (spec.lo < sc.theta1) {
    throw std::invalid_argument("sweep: curves range must start at or above theta1");
  }
  const LinkParams l1 = sc.link1();
  const LinkParams l2 = sc.link2();
  const SolverOptions opts = sc.solver_options();
  const double tb = l1.tb();

  std::optional<double> theta_star;
  try {
    theta_star = crossing_theta_star(l1, l2, sc.theta1, opts);
  } catch (const NoSolution&) {
    // curves may simply not cross (e.g. a much faster second hop)
  }

  if (sc.format == "json") {
    nlohmann::json points = nlohmann::json::array();
    for (double theta : spec.grid()) {
      points.push_back(
          {{"theta", json_value(theta)},
           {"E_C_norm", json_value(link_effective_capacity(l2, theta) / tb)},
           {"E_B_norm",
            json_value(virtual_effective_bandwidth(l1, theta, sc.theta1) / tb)}});
    }
    nlohmann::json out{{"points", points}, {"theta_star", json_value(theta_star)}};
    return out.dump() + "\n";
  }

  std::string out = "theta,E_C_norm,E_B_norm\n";
  for (double theta : spec.grid()) {
    out += format_double(theta);
    out += "," + format_double(link_effective_capacity(l2, theta) / tb);
    out += "," + format_double(virtual_effective_bandwidth(l1, theta, sc.theta1) / tb);
    out += "\n";
  }
  out += "# theta_star," + (theta_star ? format_double(*theta_star) : std::string()) + "\n";
  return out;
}

std::string run_sweep(const Scenario& sc) {
  if (!sc.sweep) throw std::invalid_argument("sweep: missing sweep spec");
  const LinkParams l1 = sc.link1();
  const SolverOptions opts = sc.solver_options();
  const double tb = l1.tb();

  if (sc.sweep->var == SweepSpec::Var::Theta2) {
    const LinkParams l2 = sc.link2();
    // theta_star and the stationary point depend only on (links, theta1), so
    // the case-II geometry is shared by every grid point.
    std::optional<CaseTwoGeometry> geom;
    nlohmann::json rows = nlohmann::json::array();
    std::string csv = "theta2,r_e_bits_per_block,r_e_norm,case\n";
    for (double theta2 : sc.sweep->grid()) {
      const QosPair qos(sc.theta1, theta2);
      const CaseTwoGeometry* gp = nullptr;
      if (theta2 > sc.theta1) {
        if (!geom) geom = analyze_case_two(l1, l2, sc.theta1, opts);
        gp = &*geom;
      }
      const EffCapResult res = effective_capacity(l1, l2, qos, opts, gp);
      if (sc.format == "json") {
        rows.push_back({{"theta2", json_value(theta2)},
                        {"r_e_bits_per_block", json_value(res.r_e)},
                        {"r_e_norm", json_value(res.r_e / tb)},
                        {"case", to_string(res.case_tag)}});
      } else {
        csv += format_double(theta2);
        csv += "," + format_double(res.r_e);
        csv += "," + format_double(res.r_e / tb);
        csv += std::string(",") + to_string(res.case_tag) + "\n";
      }
    }
    return sc.format == "json" ? nlohmann::json{{"points", rows}}.dump() + "\n" : csv;
  }

  if (sc.sweep->var == SweepSpec::Var::Snr2Db) {
    nlohmann::json rows = nlohmann::json::array();
    std::string csv = "snr2_db,theta2_prime\n";
    for (double snr2_db : sc.sweep->grid()) {
      Scenario point = sc;
      point.snr2_db = snr2_db;
      const double tp = theta2_prime(l1, point.link2(), sc.theta1, opts);
      if (sc.format == "json") {
        rows.push_back({{"snr2_db", json_value(snr2_db)},
                        {"theta2_prime", json_value(tp)}});
      } else {
        csv += format_double(snr2_db) + "," + format_double(tp) + "\n";
      }
    }
    return sc.format == "json" ? nlohmann::json{{"points", rows}}.dump() + "\n" : csv;
  }

  throw std::invalid_argument("sweep: the sweep command handles 'theta2' or 'snr2_db'");
}

namespace {

struct SlopeCheck {
  bool measurable = false;
  DecayFit fit{0.0, 0.0, 0};
  std::string note;  // set when unmeasurable

  std::string pass_text(double target, double margin) const {
    if (!measurable) return "unmeasurable";
    return fit.slope >= margin * target ? "true" : "false";
  }
};

SlopeCheck pooled_slope(const std::vector<SimResult>& reps, QueueId queue) {
  SlopeCheck check;
  std::vector<DecayFit> fits;
  for (const auto& r : reps) {
    try {
      fits.push_back(estimate_decay(r, queue));
    } catch (const InsufficientData& e) {
      check.note = e.what();
    }
  }
  if (fits.empty()) return check;
  check.measurable = true;
  check.fit = pool_fits(fits);
  return check;
}

}  // namespace

std::string run_simulate(const Scenario& sc) {
  const LinkParams l1 = sc.link1();
  const LinkParams l2 = sc.link2();
  const SolverOptions opts = sc.solver_options();
  const QosPair qos = sc.qos();

  double analytic_rate = 0.0;
  if (sc.single_queue) {
    analytic_rate = link_effective_capacity(l1, sc.theta1, opts.quad_rel_tol);
  } else {
    analytic_rate = effective_capacity(l1, l2, qos, opts).r_e;
  }
  const double rate = sc.rate_frac * analytic_rate;
  if (!(rate > 0.0)) {
    throw std::invalid_argument("simulate: nonpositive arrival rate (unstable setup?)");
  }

  SimConfig config{l1, l2, rate, sc.blocks, sc.seed,
                   sc.thresholds ? *sc.thresholds : default_thresholds(l1.tb()),
                   static_cast<std::uint64_t>(sc.warmup_frac * sc.blocks),
                   sc.single_queue};
  const std::vector<SimResult> reps = run_replicated(config, sc.replications);

  // Equal-length replications: the pooled curve is the plain mean.
  std::vector<double> p1(config.thresholds.size(), 0.0);
  std::vector<double> p2(config.thresholds.size(), 0.0);
  bool warned = false;
  for (const auto& r : reps) {
    for (std::size_t i = 0; i < p1.size(); ++i) {
      p1[i] += r.source.overflow_prob[i] / reps.size();
      p2[i] += r.relay.overflow_prob[i] / reps.size();
    }
    warned = warned || r.stability_warning;
  }
  const SlopeCheck source = pooled_slope(reps, QueueId::Source);
  const SlopeCheck relay = pooled_slope(reps, QueueId::Relay);

  double d1 = 0.0, d2 = 0.0, q1avg = 0.0, q2avg = 0.0;
  for (const auto& r : reps) {
    d1 += r.source_departure_rate / reps.size();
    d2 += r.relay_departure_rate / reps.size();
    q1avg += r.source.time_avg_len / reps.size();
    q2avg += r.relay.time_avg_len / reps.size();
  }

  if (sc.format == "json") {
    nlohmann::json curves = nlohmann::json::array();
    for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
      curves.push_back({{"threshold_bits", json_value(config.thresholds[i])},
                        {"source_prob", json_value(p1[i])},
                        {"relay_prob", json_value(p2[i])}});
    }
    auto slope_json = [&](const SlopeCheck& s, double target) {
      nlohmann::json j{{"measurable", s.measurable},
                       {"target_theta", json_value(target)},
                       {"pass", s.pass_text(target, sc.margin)}};
      if (s.measurable) {
        j["slope"] = json_value(s.fit.slope);
        j["std_error"] = json_value(s.fit.std_error);
        j["points_used"] = s.fit.points_used;
      }
      return j;
    };
    nlohmann::json out{
        {"arrival_rate_bits_per_block", json_value(rate)},
        {"analytic_rate_bits_per_block", json_value(analytic_rate)},
        {"blocks", sc.blocks},
        {"replications", sc.replications},
        {"stability_warning", warned},
        {"curves", curves},
        {"source", slope_json(source, sc.theta1)},
        {"relay", slope_json(relay, sc.theta2)},
        {"source_departure_rate", json_value(d1)},
        {"relay_departure_rate", json_value(d2)},
        {"source_mean_queue_bits", json_value(q1avg)},
        {"relay_mean_queue_bits", json_value(q2avg)},
    };
    return out.dump() + "\n";
  }

  std::string out = "queue,threshold_bits,overflow_prob\n";
  for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
    out += "source," + format_double(config.thresholds[i]) + "," + format_double(p1[i]) + "\n";
  }
  for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
    out += "relay," + format_double(config.thresholds[i]) + "," + format_double(p2[i]) + "\n";
  }
  auto slope_line = [&](const char* name, const SlopeCheck& s, double target) {
    std::string line = std::string("# ") + name + "_slope,";
    line += s.measurable ? format_double(s.fit.slope) : "unmeasurable";
    line += std::string(",") + name + "_stderr,";
    line += s.measurable ? format_double(s.fit.std_error) : "";
    line += ",target_theta," + format_double(target);
    line += ",pass," + s.pass_text(target, sc.margin);
    return line + "\n";
  };
  out += "# arrival_rate_bits_per_block," + format_double(rate) +
         ",analytic_rate_bits_per_block," + format_double(analytic_rate) + "\n";
  out += slope_line("source", source, sc.theta1);
  out += slope_line("relay", relay, sc.theta2);
  out += "# source_departure_rate," + format_double(d1) + ",relay_departure_rate," +
         format_double(d2) + "\n";
  out += "# source_mean_queue_bits," + format_double(q1avg) + ",relay_mean_queue_bits," +
         format_double(q2avg) + "\n";
  out += std::string("# stability_warning,") + (warned ? "true" : "false") + "\n";
  return out;
}

}  // namespace effcap
