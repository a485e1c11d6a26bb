// Command-line driver: curve, surface, critical, validate.
#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qjumps/commands.hpp"
#include "qjumps/errors.hpp"

using namespace qjumps;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> scheme, pair, out, sampling;
  std::optional<double> omega, eta, dt, t_final, tol;
  std::optional<std::vector<double>> eta_grid, eta_a_grid, eta_b_grid;
  std::optional<std::size_t> n_traj, budget;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON configuration file");
  sub->add_option("--omega", f.omega, "Rabi frequency in units of gamma");
  sub->add_option("--eta", f.eta, "single efficiency (shorthand for a one-point grid)");
  sub->add_option("--eta-grid", f.eta_grid, "efficiency grid")->delimiter(',');
  sub->add_option("--dt", f.dt, "integration step in units of 1/gamma");
  sub->add_option("--t-final", f.t_final, "trajectory length in units of 1/gamma");
  sub->add_option("--n-traj", f.n_traj, "trajectories per ensemble");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "result file");
  sub->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  sub->add_option("--sampling", f.sampling, "time | halt");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config_path.empty()) {
    std::ifstream is(f.config_path);
    if (!is) throw ConfigError("cannot read config file " + f.config_path);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
      c = RunConfig::from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
  }
  if (f.scheme) c.scheme = *f.scheme;
  if (f.pair) c.pair = *f.pair;
  if (f.omega) c.omega = *f.omega;
  if (f.eta_grid) c.eta_grid = *f.eta_grid;
  if (f.eta) c.eta_grid = {*f.eta};
  if (f.eta_a_grid) c.eta_a_grid = *f.eta_a_grid;
  if (f.eta_b_grid) c.eta_b_grid = *f.eta_b_grid;
  if (f.dt) c.dt = *f.dt;
  if (f.t_final) c.t_final = *f.t_final;
  if (f.n_traj) c.n_traj = *f.n_traj;
  if (f.seed) c.seed = *f.seed;
  if (f.tol) c.tol = *f.tol;
  if (f.budget) c.budget = *f.budget;
  if (f.out) c.out = *f.out;
  if (f.workers) c.workers = *f.workers;
  if (f.sampling) c.sampling = *f.sampling;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-jump detector-dependence engine"};
  app.require_subcommand(1);
  Flags f;

  auto* curve = app.add_subcommand("curve", "stationary purity versus efficiency");
  add_common(curve, f);
  curve->add_option("--scheme", f.scheme, "said | x_lab | y_lab | y_secular");

  auto* surface = app.add_subcommand("surface", "steering sum over (eta_A, eta_B)");
  add_common(surface, f);
  surface->add_option("--pair", f.pair, "said_y | x_y");
  surface->add_option("--eta-a-grid", f.eta_a_grid, "efficiency grid for scheme A")->delimiter(',');
  surface->add_option("--eta-b-grid", f.eta_b_grid, "efficiency grid for scheme B")->delimiter(',');

  auto* critical = app.add_subcommand("critical", "critical efficiency on the diagonal");
  add_common(critical, f);
  critical->add_option("--pair", f.pair, "said_y | x_y");
  critical->add_option("--tol", f.tol, "bisection tolerance (>= 0.01)");
  critical->add_option("--budget", f.budget, "maximum trajectories per ensemble");

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  RunConfig config;
  try {
    config = resolve(f);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    CommandResult result;
    if (name == "curve") result = cmd_curve(config);
    else if (name == "surface") result = cmd_surface(config);
    else if (name == "critical") result = cmd_critical(config);
    else result = cmd_validate(config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(name, config, result, secs);
    std::cout << result.message << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::validation_failed;
  }
}
