#pragma once

#include <vector>

#include "qjumps/steering.hpp"

namespace qjumps {

/// Simultaneous-measurement null model: one atom monitored by both of Alice's
/// detectors at once (efficiencies summing to at most 1). Each label is produced
/// by a filter that only sees its own detector's record, while Bob measures the
/// state conditioned on both records.
struct NullSample {
  BlochState state;  // conditioned on both records
  std::array<double, 2> label_a{};
  std::array<double, 2> label_b{};
  double time = 0.0;
};

std::vector<NullSample> run_null_trajectory(Pair pair, double eta_a, double eta_b, double omega,
                                            double dt, std::span<const double> sample_times,
                                            RandomStream& rng);

struct NullEnsembles {
  ConditionedEnsemble a;
  ConditionedEnsemble b;
};

/// Throws ConfigError unless eta_a + eta_b ≤ 1.
NullEnsembles build_null_ensembles(Pair pair, double eta_a, double eta_b, double omega,
                                   const EnsembleOptions& options);

SteeringResult null_model_steering(Pair pair, double eta_a, double eta_b, double omega,
                                   const EnsembleOptions& options,
                                   const BootstrapOptions& bootstrap = {});

}  // namespace qjumps
