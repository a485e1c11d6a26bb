#pragma once

#include <string>
#include <vector>

#include "qjumps/commands.hpp"

namespace qjumps {

struct CheckResult {
  std::string name;
  bool pass = false;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// The release gate: ME averages, oracle cross-checks, noise moments, flow
/// closure and confinement, estimator bias, null-model bound and determinism.
/// Runs with the configuration's dt, Ω, seed and sideband sign.
std::vector<CheckResult> run_validation(const RunConfig& config);

}  // namespace qjumps
