#pragma once

#include <span>

#include "qjumps/bloch_state.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/random.hpp"
#include "qjumps/trajectory.hpp"

namespace qjumps {

/// x-diagonal conditional state under spectral adaptive interferometric detection,
/// with the sign of the local oscillator currently applied to the central peak.
struct SaidState {
  double w_plus = 1.0;
  double w_minus = 0.0;
  int lo_sign = +1;
  double t_last_jump = 0.0;

  static SaidState after_jump(int sign, double time) {
    return sign > 0 ? SaidState{1.0, 0.0, +1, time} : SaidState{0.0, 1.0, -1, time};
  }
  /// LO sign follows the dominant population (+1 on a tie).
  static SaidState from_bloch(const BlochState& s);

  double trace() const { return w_plus + w_minus; }
  double x() const { return (w_plus - w_minus) / (w_plus + w_minus); }
  BlochState bloch() const { return {w_plus + w_minus, w_plus - w_minus, 0.0, 0.0}; }
};

struct SaidDerivative {
  double dw_plus = 0.0;
  double dw_minus = 0.0;
};

/// Unnormalized no-jump evolution: secular generator minus the detected jump terms
/// (γη/4)(J[|−⟩⟨+|] + 4J[π_lo] + J[|+⟩⟨−|]).
SaidDerivative nojump_derivative(const SaidState& s, double eta, double gamma = 1.0);

/// Closed-form solution of the no-jump equation, written in the LO-matched basis:
/// a = population matching lo_sign, b = the other one.
class NoJumpPropagator {
 public:
  NoJumpPropagator(double eta, double gamma = 1.0);

  struct Populations {
    double matched;
    double other;
  };
  Populations evolve(double a0, double b0, double tau) const;
  /// Tr ρ̃(τ): probability of no detection during [0, τ).
  double survival(double a0, double b0, double tau) const;
  /// −dTr ρ̃/dτ = (γη/4)(5a + b).
  double jump_density(double a0, double b0, double tau) const;
  /// Slowest decay rate of the survival function (0 when η = 0).
  double slowest_rate() const { return -lambda_slow_; }
  /// ∫_0^∞ Tr ρ̃ dτ, the mean waiting time.
  double mean_waiting_time(double a0, double b0) const;

  double eta() const { return eta_; }
  double gamma() const { return gamma_; }

 private:
  double eta_, gamma_;
  double lambda_slow_, lambda_fast_;
  double cos_, sin_;  // eigenvector rotation
};

struct WaitingTime {
  double tau;  // +∞ when the detector never clicks (η = 0)
  SaidChannel channel;
  bool never = false;
};

/// Exact inverse-CDF sample of the next jump time and its channel.
WaitingTime sample_waiting_time(const SaidState& s0, double eta, RandomStream& rng,
                                double gamma = 1.0);

/// Post-jump sign and LO update for a channel fired while the LO had `lo_sign`.
int said_post_state(SaidChannel channel, int lo_sign);

/// Simulates one SAID trajectory from `initial` and records the normalized state
/// at each of `sample_times` (ascending). Jump events are stored when
/// `keep_jumps` is set; jump_count is always filled.
TrajectoryRecord run_said_trajectory(const SimConfig& config, double eta, RandomStream& rng,
                                     std::span<const double> sample_times,
                                     const SaidState& initial = SaidState{},
                                     bool keep_jumps = false);

/// Stationary E[x²] as the renewal-reward time average over one jump cycle,
/// ∫ x(τ)² S(τ) dτ / ∫ S(τ) dτ, to absolute accuracy `tol`.
double said_ex2_analytic(double eta, double tol = 1e-10);

/// E[x²] with x sampled immediately before each jump, −∫ x(τ)² dS(τ).
double said_ex2_jump_sampled(double eta, double tol = 1e-10);

}  // namespace qjumps
