#include "qjumps/commands.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qjumps/beta_oracle.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/said.hpp"
#include "qjumps/validate.hpp"

namespace qjumps {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("scheme", c.scheme);
  get("pair", c.pair);
  get("omega", c.omega);
  get("eta_grid", c.eta_grid);
  get("eta_a_grid", c.eta_a_grid);
  get("eta_b_grid", c.eta_b_grid);
  get("dt", c.dt);
  get("t_final", c.t_final);
  get("burn_in", c.burn_in);
  get("stride", c.stride);
  get("n_traj", c.n_traj);
  get("n_per_axis", c.n_per_axis);
  get("sampling", c.sampling);
  get("seed", c.seed);
  get("tol", c.tol);
  get("budget", c.budget);
  get("bootstrap", c.bootstrap);
  get("out", c.out);
  get("workers", c.workers);
  get("sideband_sign", c.sideband_sign);
  get("phase_check", c.phase_check);
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> known{
        "scheme", "pair",      "omega",  "eta_grid", "eta_a_grid", "eta_b_grid", "dt",
        "t_final", "burn_in",  "stride", "n_traj",   "n_per_axis", "sampling",   "seed",
        "tol",    "budget",    "bootstrap", "out",   "workers",    "sideband_sign", "phase_check"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  return c;
}

json RunConfig::to_json() const {
  auto grid = [](const std::vector<double>& g) {
    json a = json::array();
    for (double v : g) a.push_back(round12(v));
    return a;
  };
  // `out` and `workers` are left out: neither may change a result byte.
  return json{{"scheme", scheme},         {"pair", pair},
              {"omega", round12(omega)},  {"eta_grid", grid(eta_grid)},
              {"eta_a_grid", grid(eta_a_grid)}, {"eta_b_grid", grid(eta_b_grid)},
              {"dt", round12(dt)},        {"t_final", round12(t_final)},
              {"burn_in", round12(burn_in)}, {"stride", round12(stride)},
              {"n_traj", n_traj},         {"n_per_axis", n_per_axis},
              {"sampling", sampling},     {"seed", seed},
              {"tol", round12(tol)},      {"budget", budget},
              {"bootstrap", bootstrap},   {"sideband_sign", sideband_sign},
              {"phase_check", phase_check}};
}

void RunConfig::validate() const {
  parse_scheme(scheme);
  parse_pair(pair);
  if (!(omega > 0.0 && std::isfinite(omega))) throw ConfigError("omega must be positive");
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    for (double e : g) {
      if (!(e > 0.0 && e <= 1.0)) throw ConfigError(std::string(name) + " values must lie in (0, 1]");
    }
  };
  if (eta_grid.empty()) throw ConfigError("eta_grid must not be empty");
  check_grid(eta_grid, "eta_grid");
  check_grid(eta_a_grid, "eta_a_grid");
  check_grid(eta_b_grid, "eta_b_grid");
  if (dt < 0.0) throw ConfigError("dt must be positive (or 0 for the default)");
  if (!(burn_in >= 10.0)) throw ConfigError("burn_in must be at least 10/gamma");
  if (!(stride > 0.0)) throw ConfigError("stride must be positive");
  if (sampling != "time" && sampling != "halt") throw ConfigError("sampling must be 'time' or 'halt'");
  if (sampling == "time" && !(t_final >= burn_in)) throw ConfigError("t_final must be >= burn_in");
  if (n_traj == 0) throw ConfigError("n_traj must be positive");
  if (n_per_axis < 2) throw ConfigError("n_per_axis must be at least 2");
  if (!(tol >= 0.01)) throw ConfigError("tol must be at least 0.01");
  if (budget < n_traj) throw ConfigError("budget must be at least n_traj");
  if (bootstrap < 2) throw ConfigError("bootstrap needs at least 2 resamples");
  if (sideband_sign != "standard" && sideband_sign != "flipped") {
    throw ConfigError("sideband_sign must be 'standard' or 'flipped'");
  }
}

std::size_t RunConfig::records_per_trajectory() const {
  if (sampling == "halt") return 1;
  return static_cast<std::size_t>(std::floor((t_final - burn_in) / stride + 1e-9)) + 1;
}

EnsembleOptions RunConfig::ensemble_options() const {
  EnsembleOptions o;
  o.mode = sampling == "halt" ? SamplingMode::halt_time : SamplingMode::time_sampled;
  o.records_per_trajectory = records_per_trajectory();
  o.n_records = n_traj * o.records_per_trajectory;
  o.burn_in = burn_in;
  o.stride = stride;
  o.dt = dt;
  o.n_per_axis = n_per_axis;
  o.seed = seed;
  o.workers = workers;
  return o;
}

BootstrapOptions RunConfig::bootstrap_options() const {
  BootstrapOptions b;
  b.resamples = bootstrap;
  b.seed = seed;
  return b;
}

namespace {

std::string out_or(const RunConfig& c, const char* fallback) {
  return c.out.empty() ? fallback : c.out;
}

std::string manifest_path(const std::string& result_path) { return result_path + ".manifest.json"; }

std::string manifest_comment(const std::string& result_path) {
  const auto slash = result_path.find_last_of('/');
  const std::string base = slash == std::string::npos ? result_path : result_path.substr(slash + 1);
  return "# manifest: " + manifest_path(base) + "\n";
}

std::string manifest_name(const std::string& result_path) {
  const auto slash = result_path.find_last_of('/');
  return manifest_path(slash == std::string::npos ? result_path : result_path.substr(slash + 1));
}

}  // namespace

CommandResult cmd_curve(const RunConfig& config) {
  config.validate();
  const Scheme scheme = parse_scheme(config.scheme);
  const std::string path = out_or(config, "curve.csv");
  std::ostringstream csv;
  csv << manifest_comment(path) << "eta,value,mc_error,method\n";
  const EnsembleOptions eo = config.ensemble_options();
  for (double eta : config.eta_grid) {
    const MeanEstimate mc = stationary_purity(scheme, eta, config.omega, eo);
    csv << format_number(eta) << ',' << format_number(mc.mean) << ','
        << format_number(mc.standard_error) << ",mc\n";
    if (scheme == Scheme::said) {
      csv << format_number(eta) << ',' << format_number(said_ex2_analytic(eta)) << ",0,oracle\n";
    } else if (scheme == Scheme::y_secular) {
      csv << format_number(eta) << ',' << format_number(expected_beta(eta).value) << ",0,oracle\n";
    }
  }
  CommandResult r;
  r.files.push_back({path, csv.str()});
  r.message = "wrote " + path;
  return r;
}

CommandResult cmd_surface(const RunConfig& config) {
  config.validate();
  const Pair pair = parse_pair(config.pair);
  const auto& grid_a = config.eta_a_grid.empty() ? config.eta_grid : config.eta_a_grid;
  const auto& grid_b = config.eta_b_grid.empty() ? config.eta_grid : config.eta_b_grid;
  const EnsembleOptions eo = config.ensemble_options();
  const BootstrapOptions bo = config.bootstrap_options();

  // One ensemble per efficiency on each side; every cell reuses them.
  struct Term {
    double value, error;
  };
  std::vector<Term> ta, tb;
  for (double e : grid_a) {
    const auto ens = build_ensemble(scheme_a(pair), e, config.omega, eo);
    const BinSpec bins = BinSpec::for_scheme(ens.scheme);
    ta.push_back({bin_estimate(ens, Functional::f1, bins).value,
                  bootstrap_error(ens, Functional::f1, bins, bo)});
  }
  for (double e : grid_b) {
    const auto ens = build_ensemble(scheme_b(pair), e, config.omega, eo);
    const BinSpec bins = BinSpec::for_scheme(ens.scheme);
    tb.push_back({bin_estimate(ens, Functional::f2, bins).value,
                  bootstrap_error(ens, Functional::f2, bins, bo)});
  }

  const std::string path = out_or(config, "surface.csv");
  std::ostringstream csv;
  csv << manifest_comment(path) << "eta_A,eta_B,S,mc_error\n";
  json cells = json::array();
  for (std::size_t i = 0; i < grid_a.size(); ++i) {
    for (std::size_t k = 0; k < grid_b.size(); ++k) {
      const double s = ta[i].value + tb[k].value;
      const double err = std::hypot(ta[i].error, tb[k].error);
      csv << format_number(grid_a[i]) << ',' << format_number(grid_b[k]) << ','
          << format_number(s) << ',' << format_number(err) << '\n';
      if (s > 1.0) {
        cells.push_back({{"eta_A", round12(grid_a[i])},
                         {"eta_B", round12(grid_b[k])},
                         {"S", round12(s)},
                         {"mc_error", round12(err)},
                         {"significant", s - 1.0 > 3.0 * err}});
      }
    }
  }
  json summary{{"pair", config.pair},
               {"omega", round12(config.omega)},
               {"seed", config.seed},
               {"violating_cells", cells},
               {"manifest", manifest_name(path)}};
  CommandResult r;
  r.files.push_back({path, csv.str()});
  r.files.push_back({path + ".summary.json", summary.dump(2) + "\n"});
  r.message = "wrote " + path;
  return r;
}

CommandResult cmd_critical(const RunConfig& config) {
  config.validate();
  const Pair pair = parse_pair(config.pair);
  CriticalOptions co;
  co.tol = config.tol;
  co.ensemble = config.ensemble_options();
  co.initial_records = co.ensemble.n_records;
  co.budget = config.budget * co.ensemble.records_per_trajectory;
  co.bootstrap = config.bootstrap_options();
  const CriticalResult res = critical_eta(pair, config.omega, co);

  json evals = json::array();
  for (const auto& e : res.evaluations) {
    evals.push_back({{"eta", round12(e.eta)},
                     {"n_traj", e.n_records / co.ensemble.records_per_trajectory},
                     {"S", round12(1.0 + e.g)},
                     {"mc_error", round12(e.error)}});
  }
  json j{{"pair", config.pair},
         {"omega", round12(config.omega)},
         {"eta_critical", res.eta ? json(round12(*res.eta)) : json(nullptr)},
         {"tol", round12(config.tol)},
         {"n_traj_used", res.n_records_used / co.ensemble.records_per_trajectory},
         {"seed", config.seed},
         {"bracket", {round12(res.bracket_lo), round12(res.bracket_hi)}},
         {"evaluations", evals},
         {"manifest", manifest_name(out_or(config, "critical.json"))}};
  CommandResult r;
  switch (res.status) {
    case CriticalStatus::found:
      j["status"] = "found";
      r.exit_code = exit_code::ok;
      break;
    case CriticalStatus::none:
      j["status"] = "none";
      j["reason"] = "S does not exceed 1 on (0.5, 1]";
      r.exit_code = exit_code::ok;
      break;
    case CriticalStatus::inconclusive:
      j["status"] = "inconclusive";
      j["reason"] = "inconclusive";
      r.exit_code = exit_code::inconclusive;
      break;
  }
  r.files.push_back({out_or(config, "critical.json"), j.dump(2) + "\n"});
  r.message = res.eta ? "eta_critical = " + format_number(*res.eta) : "eta_critical = null";
  return r;
}

CommandResult cmd_validate(const RunConfig& config) {
  config.validate();
  const auto checks = run_validation(config);
  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    list.push_back({{"name", c.name},
                    {"pass", c.pass},
                    {"discrepancy", round12(c.discrepancy)},
                    {"tolerance", round12(c.tolerance)},
                    {"detail", c.detail}});
  }
  const std::string path = out_or(config, "validate.json");
  json j{{"all_pass", all}, {"checks", list}, {"manifest", manifest_name(path)}};
  CommandResult r;
  r.exit_code = all ? exit_code::ok : exit_code::validation_failed;
  r.files.push_back({path, j.dump(2) + "\n"});
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  r.message = std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) +
              " checks passed";
  return r;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

void write_outputs(const std::string& command, const RunConfig& config,
                   const CommandResult& result, double wall_seconds) {
  json digests = json::array();
  for (const auto& f : result.files) {
    std::ofstream os(f.path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + f.path);
    os << f.content;
    digests.push_back({{"path", f.path}, {"sha256", sha256_hex(f.content)}});
  }
  if (result.files.empty()) return;
  json m{{"command", command},
         {"config", config.to_json()},
         {"seed", config.seed},
         {"version", kVersion},
         {"wall_clock_seconds", round12(wall_seconds)},
         {"outputs", digests}};
  const std::string path = manifest_path(result.files.front().path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << m.dump(2) << "\n";
}

}  // namespace qjumps
