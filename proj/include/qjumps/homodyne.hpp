#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "qjumps/bloch_state.hpp"
#include "qjumps/kraus.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/random.hpp"
#include "qjumps/trajectory.hpp"

namespace qjumps {

enum class DiffusiveFrame { lab, secular_y };

/// Diffusive unravelling of the lab-frame master equation, ⟨|dZ|²⟩ = η dt,
/// ⟨dZ²⟩ = υ dt with |υ| ≤ η; or the secular Y-homodyne scheme (only η used).
struct DiffusiveSpec {
  double eta = 1.0;
  std::complex<double> upsilon{1.0, 0.0};
  DiffusiveFrame frame = DiffusiveFrame::lab;

  static DiffusiveSpec x_homodyne(double eta) { return {eta, {eta, 0.0}, DiffusiveFrame::lab}; }
  static DiffusiveSpec y_homodyne(double eta) { return {eta, {-eta, 0.0}, DiffusiveFrame::lab}; }
  static DiffusiveSpec qsd() { return {1.0, {0.0, 0.0}, DiffusiveFrame::lab}; }
  static DiffusiveSpec secular_y(double eta) {
    return {eta, {-eta, 0.0}, DiffusiveFrame::secular_y};
  }
  static DiffusiveSpec general(double eta, std::complex<double> upsilon) {
    return {eta, upsilon, DiffusiveFrame::lab};
  }

  /// Local-oscillator phase φ = arg(υ)/2 (0 when υ = 0).
  double phi() const;
  /// Throws ConfigError unless 0 ≤ |υ| ≤ η ≤ 1.
  void validate() const;
};

struct NoiseIncrement {
  std::complex<double> dZ{};        // lab frame
  std::complex<double> dV_omega{};  // secular frame, ⟨|dV|²⟩ = dt, ⟨dV²⟩ = 0
  double dW_x = 0.0;                // secular frame
};

NoiseIncrement sample_noise(const DiffusiveSpec& spec, double dt, RandomStream& rng);

/// Sign in front of the i dV* |+⟩⟨−| term of the secular Y equation. The standard
/// value follows from the rotating-frame transform with t0 = 0; the flipped value
/// exists so the convention independence of the β statistics can be exercised.
enum class SidebandSign { standard, flipped };

/// Precomputed lab-frame step for a fixed (spec, Ω, γ, dt).
class LabDiffusiveStepper {
 public:
  LabDiffusiveStepper(const DiffusiveSpec& spec, double omega, double gamma, double dt);

  Mat2 step(const Mat2& rho, const NoiseIncrement& noise) const;
  const DiffusiveModel& model() const { return model_; }
  double dt() const { return dt_; }

 private:
  DiffusiveModel model_;
  double dt_;
  double phi_;
  bool has_second_channel_;
};

/// Secular Y-homodyne step, split into the sideband part (dV_Ω, |∓⟩⟨±|) and the
/// central part (dW_x, σx); each part is completely positive and maps the x = 0
/// plane onto itself.
class SecularYStepper {
 public:
  SecularYStepper(double eta, double gamma, double dt, SidebandSign sign = SidebandSign::standard);

  Mat2 step(const Mat2& rho, const NoiseIncrement& noise) const;
  const DiffusiveModel& sideband_model() const { return sideband_; }
  const DiffusiveModel& central_model() const { return central_; }
  double dt() const { return dt_; }
  double eta() const { return eta_; }

 private:
  DiffusiveModel sideband_;
  DiffusiveModel central_;
  double eta_;
  double dt_;
};

/// Channel decomposition shared with the doubly-conditioned simulations.
DiffusiveModel lab_homodyne_model(const DiffusiveSpec& spec, double omega, double gamma, double dt,
                                  double unread_fraction);
void secular_y_models(double eta, double gamma, double unread_fraction, SidebandSign sign,
                      DiffusiveModel& sideband, DiffusiveModel& central);
/// Innovations for the lab channels: (Re, Im) of e^{−iφ} dZ.
std::array<double, 2> lab_innovations(const DiffusiveSpec& spec, const NoiseIncrement& noise);
/// Innovations for the secular channels: sideband (√η Re dV, √η Im dV), central √η dW_x.
std::array<double, 3> secular_innovations(double eta, const NoiseIncrement& noise);

BlochState diffusive_step(const BlochState& state, const DiffusiveSpec& spec, double omega,
                          double gamma, double dt, const NoiseIncrement& noise);

BlochState secular_y_step(const BlochState& state, double eta, double gamma, double dt,
                          const NoiseIncrement& noise, SidebandSign sign = SidebandSign::standard);

/// Runs one trajectory from `initial` and records the normalized state at each of
/// `sample_times` (ascending; rounded to the step grid). Frame follows spec.frame;
/// for the lab frame config.omega sets the drive and config.dt must resolve it.
TrajectoryRecord run_homodyne_trajectory(const SimConfig& config, const DiffusiveSpec& spec,
                                         RandomStream& rng, std::span<const double> sample_times,
                                         const BlochState& initial = BlochState::ground(),
                                         SidebandSign sign = SidebandSign::standard);

}  // namespace qjumps
