#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qjumps/steering.hpp"

namespace qjumps {

inline constexpr const char* kVersion = "qjumps 0.1.0";

/// Everything a command depends on. JSON config first, then flag overrides.
struct RunConfig {
  std::string scheme = "said";
  std::string pair = "said_y";
  double omega = 5.0;
  std::vector<double> eta_grid{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> eta_a_grid;  // empty → eta_grid
  std::vector<double> eta_b_grid;  // empty → eta_grid
  double dt = 0.0;                 // 0 → per-frame default
  double t_final = 519.0;          // length of each time-sampled trajectory
  double burn_in = 20.0;
  double stride = 1.0;
  std::size_t n_traj = 40;
  int n_per_axis = 4;
  std::string sampling = "time";  // time | halt
  std::uint64_t seed = 20130601;
  double tol = 0.01;
  std::size_t budget = 640;  // trajectories per ensemble, critical search cap
  int bootstrap = 200;
  std::string out;
  unsigned workers = 0;
  std::string sideband_sign = "standard";  // standard | flipped
  bool phase_check = true;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws ConfigError on anything out of range.
  void validate() const;

  std::size_t records_per_trajectory() const;
  EnsembleOptions ensemble_options() const;
  BootstrapOptions bootstrap_options() const;
};

/// 12 significant digits, the format of every number the CLI writes.
std::string format_number(double v);
/// Rounds through format_number so JSON output carries 12 significant digits.
double round12(double v);

struct OutputFile {
  std::string path;
  std::string content;
};

struct CommandResult {
  int exit_code = 0;
  std::vector<OutputFile> files;
  std::string message;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation_failed = 1;
inline constexpr int usage = 2;
inline constexpr int inconclusive = 3;
}  // namespace exit_code

CommandResult cmd_curve(const RunConfig& config);
CommandResult cmd_surface(const RunConfig& config);
CommandResult cmd_critical(const RunConfig& config);
CommandResult cmd_validate(const RunConfig& config);

std::string sha256_hex(const std::string& data);

/// Writes the result files and `<first file>.manifest.json` with the resolved
/// configuration, version, wall-clock duration and SHA-256 of every output.
void write_outputs(const std::string& command, const RunConfig& config,
                   const CommandResult& result, double wall_seconds);

}  // namespace qjumps
