#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qjumps/bloch_state.hpp"

namespace qjumps {

/// Time is measured in units of 1/γ throughout; gamma stays a field so the generators
/// can be checked for their scaling, but the drivers only ever use γ = 1.
struct SimConfig {
  double gamma = 1.0;
  double omega = 5.0;
  double dt = 1e-3;
  double t_final = 50.0;
  std::uint64_t seed = 20130601;
  std::size_t n_traj = 1000;

  /// Throws ConfigError unless gamma > 0 and dt > 0.
  void validate() const;
  /// Additionally requires dt ≤ 1e-2 / max(1, Ω).
  void validate_lab_frame() const;
};

/// Default step for the lab frame: min(1e-3, 1e-2/Ω).
double default_lab_dt(double omega);
inline constexpr double kDefaultSecularDt = 1e-3;

enum class Frame { lab, secular };

/// Resonance-fluorescence generator in the interaction frame: −i[(Ω/2)σx, ρ] + γD[σ−]ρ.
BlochDerivative exact_liouvillian(const BlochState& state, double omega, double gamma);

/// Secular generator in the Ω-rotating frame: (γ/4)(D[|−⟩⟨+|] + D[σx] + D[|+⟩⟨−|]).
BlochDerivative secular_liouvillian(const BlochState& state, double gamma);

/// Steady state of exact_liouvillian.
BlochState exact_steady_state(double omega, double gamma);

/// Fixed-step RK4 from t = 0 to config.t_final.
BlochState propagate_me(const BlochState& state, const SimConfig& config, Frame frame);

/// RK4 solution sampled at each of `times` (ascending, ≥ 0).
std::vector<BlochState> propagate_me_at(const BlochState& state, const SimConfig& config,
                                        Frame frame, std::span<const double> times);

/// Maps a lab-frame state at time t into the Ω-rotating frame (t0 = 0).
BlochState to_rotating_frame(const BlochState& lab, double omega, double t);

}  // namespace qjumps
