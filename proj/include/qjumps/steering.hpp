#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qjumps/bloch_state.hpp"
#include "qjumps/random.hpp"
#include "qjumps/stats.hpp"

namespace qjumps {

/// Monitoring schemes Alice can run. SAID and y_secular live in the Ω-rotating
/// frame with the secular approximation; x_lab and y_lab are lab-frame homodyne.
enum class Scheme { said, x_lab, y_lab, y_secular };
/// Scheme pairs for the steering test: (A → f1 term, B → f2 term).
enum class Pair { said_y, x_y };

std::string to_string(Scheme s);
std::string to_string(Pair p);
Scheme parse_scheme(const std::string& name);
Pair parse_pair(const std::string& name);
Scheme scheme_a(Pair p);
Scheme scheme_b(Pair p);
/// 1 for schemes labelled by x, 2 for schemes labelled by (y, z).
int label_dims(Scheme s);

enum class Axis { x = 0, y = 1, z = 2 };

struct AxisTally {
  std::int32_t plus = 0;
  std::int32_t total = 0;
  double sum() const { return 2.0 * plus - total; }
};

struct BobOutcomes {
  std::array<std::vector<int>, 3> outcomes;  // ±1 per draw, indexed by Axis
};

/// Ideal projective readout: each outcome is +1 with probability (1 + ⟨σ_axis⟩)/2.
BobOutcomes simulate_bob_outcomes(const BlochState& state, std::span<const Axis> axes,
                                  int n_per_axis, RandomStream& rng);
AxisTally tally(std::span<const int> outcomes);

struct EnsembleRecord {
  std::array<double, 2> label{};  // x, or (y, z)
  BlochState state;               // state Bob's qubit is actually in
  std::array<AxisTally, 3> bob{};
  double halt_time = 0.0;
  std::uint32_t trajectory = 0;
};

/// Stationary ensemble of (label, Bob outcomes) records for one scheme.
struct ConditionedEnsemble {
  Scheme scheme = Scheme::said;
  double eta = 1.0;
  double omega = 0.0;
  std::vector<EnsembleRecord> records;
};

enum class SamplingMode {
  time_sampled,  // many records per long trajectory, spaced by `stride`
  halt_time,     // one record per trajectory at T ~ U[20, 40]/γ
};

struct EnsembleOptions {
  std::size_t n_records = 20000;
  std::size_t records_per_trajectory = 500;
  double burn_in = 20.0;
  double stride = 1.0;
  double halt_min = 20.0;
  double halt_max = 40.0;
  double dt = 0.0;  // 0 → frame default
  int n_per_axis = 4;
  SamplingMode mode = SamplingMode::time_sampled;
  std::uint64_t seed = 20130601;
  unsigned workers = 0;
};

/// Integration step actually used for a scheme (explicit dt wins over defaults).
double scheme_dt(Scheme s, double omega, double dt_override);

/// Simulates Alice's monitoring and Bob's readout. Substreams depend only on
/// (seed, trajectory index), so ensembles at different η share common randomness.
ConditionedEnsemble build_ensemble(Scheme scheme, double eta, double omega,
                                   const EnsembleOptions& options);

enum class Functional { f1, f2 };

/// Uniform bins on [−1, 1]^dims.
struct BinSpec {
  int bins_per_dim = 50;
  static BinSpec for_scheme(Scheme s) { return {label_dims(s) == 1 ? 50 : 24}; }
};

struct BinEstimate {
  double value = 0.0;
  std::size_t bins_used = 0;
  std::size_t bins_merged = 0;
};

/// Bob's estimate of E[f(ρ)]: per bin the bias-corrected squared mean
/// m̂² − v̂/n for each axis of the functional, averaged over bins weighted by
/// their record counts. Bins with fewer than two outcomes on an axis are merged
/// into the next occupied bin.
BinEstimate bin_estimate(const ConditionedEnsemble& ensemble, Functional functional,
                         const BinSpec& bins);

/// Same binning, with each bin's exact mean Bloch vector in place of Bob's data.
BinEstimate bin_estimate_exact(const ConditionedEnsemble& ensemble, Functional functional,
                               const BinSpec& bins);

/// Weighted variant used by the bootstrap; multiplicity[i] counts record i.
BinEstimate bin_estimate_weighted(const ConditionedEnsemble& ensemble, Functional functional,
                                  const BinSpec& bins, std::span<const std::uint32_t> multiplicity);

struct BootstrapOptions {
  int resamples = 200;
  std::size_t block = 8;  // consecutive records of one trajectory resampled together
  std::uint64_t seed = 20130601;
};

struct SteeringResult {
  double s_value = 0.0;
  double term_f1 = 0.0;
  double term_f2 = 0.0;
  double mc_error = 0.0;
  double error_f1 = 0.0;
  double error_f2 = 0.0;
  double eta_a = 0.0;
  double eta_b = 0.0;
  std::string scheme_pair;
  double omega = 0.0;
};

/// Bootstrap standard error of one term.
double bootstrap_error(const ConditionedEnsemble& ensemble, Functional functional,
                       const BinSpec& bins, const BootstrapOptions& options);

/// S = E[f1(ρ^A)] + E[f2(ρ^B)] with a block-bootstrap error over records.
SteeringResult steering_sum(const ConditionedEnsemble& ensemble_a,
                            const ConditionedEnsemble& ensemble_b,
                            const BootstrapOptions& options = {});
SteeringResult steering_sum(const ConditionedEnsemble& ensemble_a,
                            const ConditionedEnsemble& ensemble_b, const BinSpec& bins_a,
                            const BinSpec& bins_b, const BootstrapOptions& options);

/// Time-averaged E[f] of the scheme's conditional states (f1 for x-labelled
/// schemes, f2 for (y, z)-labelled ones) with a blocked standard error.
MeanEstimate stationary_purity(Scheme scheme, double eta, double omega,
                               const EnsembleOptions& options);

struct CriticalOptions {
  double tol = 0.01;
  std::size_t initial_records = 20000;
  std::size_t budget = 320000;  // cap on records per ensemble
  double lo = 0.5;
  double hi = 1.0;
  double sigmas = 3.0;
  EnsembleOptions ensemble;
  BootstrapOptions bootstrap;
};

enum class CriticalStatus { found, none, inconclusive };

struct CriticalEvaluation {
  double eta;
  std::size_t n_records;
  double g;      // S − 1
  double error;  // bootstrap error of S
};

struct CriticalResult {
  CriticalStatus status = CriticalStatus::inconclusive;
  std::optional<double> eta;
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  std::size_t n_records_used = 0;
  std::vector<CriticalEvaluation> evaluations;
};

/// Noisy objective for the root search: g and its standard error from `n` records.
using NoisyObjective = std::function<CriticalEvaluation(double eta, std::size_t n)>;

/// Bisection of a noisy increasing g on [lo, hi]. Each evaluation doubles its
/// sample size until |g| clears `sigmas` errors or the budget is hit; at the budget
/// the point still counts as resolved when sigmas·error/slope ≤ tol.
CriticalResult noisy_bisection(const NoisyObjective& objective, const CriticalOptions& options);

/// noisy_bisection on g(η) = S(η, η) − 1 with equal efficiencies on both sides,
/// sample size counted in records per ensemble.
CriticalResult critical_eta(Pair pair, double omega, const CriticalOptions& options);

/// S on independent single-scheme ensembles; used by the surface command.
SteeringResult steering_at(Pair pair, double eta_a, double eta_b, double omega,
                           const EnsembleOptions& options, const BootstrapOptions& bootstrap);

}  // namespace qjumps
