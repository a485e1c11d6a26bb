#include "qjumps/homodyne.hpp"

#include <cmath>
#include <string>

#include "qjumps/errors.hpp"

namespace qjumps {

namespace {
using C = std::complex<double>;
constexpr C kI{0.0, 1.0};
}  // namespace

double DiffusiveSpec::phi() const {
  return std::abs(upsilon) > 0.0 ? 0.5 * std::arg(upsilon) : 0.0;
}

void DiffusiveSpec::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ConfigError("efficiency must lie in [0, 1], got " + std::to_string(eta));
  }
  if (frame == DiffusiveFrame::lab && std::abs(upsilon) > eta * (1.0 + 1e-12)) {
    throw ConfigError("|upsilon| must not exceed eta");
  }
}

NoiseIncrement sample_noise(const DiffusiveSpec& spec, double dt, RandomStream& rng) {
  spec.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  NoiseIncrement n;
  const double sdt = std::sqrt(dt);
  if (spec.frame == DiffusiveFrame::lab) {
    const double mod = std::min(std::abs(spec.upsilon), spec.eta);
    const double a = std::sqrt(0.5 * (spec.eta + mod));
    const double b = std::sqrt(0.5 * (spec.eta - mod));
    const double w1 = rng.normal() * sdt;
    const double w2 = b > 0.0 ? rng.normal() * sdt : 0.0;
    n.dZ = std::polar(1.0, spec.phi()) * C{a * w1, b * w2};
  } else {
    const double h = sdt * std::sqrt(0.5);
    const double re = rng.normal() * h;
    const double im = rng.normal() * h;
    n.dV_omega = {re, im};
    n.dW_x = rng.normal() * sdt;
  }
  return n;
}

DiffusiveModel lab_homodyne_model(const DiffusiveSpec& spec, double omega, double gamma, double dt,
                                  double unread_fraction) {
  spec.validate();
  const double mod = std::min(std::abs(spec.upsilon), spec.eta);
  const Mat2 c = (std::sqrt(gamma) * std::polar(1.0, -spec.phi())) * ops::sigma_minus;
  DiffusiveModel m;
  m.drift = Mat2{-0.5 * gamma, 0.0, 0.0, 0.0};
  m.channels.push_back({c, 0.5 * (spec.eta + mod)});
  m.channels.push_back({(-kI) * c, 0.5 * (spec.eta - mod)});
  if (unread_fraction > 0.0) m.unread.push_back(std::sqrt(unread_fraction * gamma) * ops::sigma_minus);
  const double theta = 0.5 * omega * dt;
  m.has_unitary = omega != 0.0;
  m.unitary = std::cos(theta) * Mat2::identity() + (-kI * std::sin(theta)) * ops::sigma_x;
  return m;
}

std::array<double, 2> lab_innovations(const DiffusiveSpec& spec, const NoiseIncrement& noise) {
  const C rotated = std::polar(1.0, -spec.phi()) * noise.dZ;
  return {rotated.real(), rotated.imag()};
}

void secular_y_models(double eta, double gamma, double unread_fraction, SidebandSign sign,
                      DiffusiveModel& sideband, DiffusiveModel& central) {
  const double half = 0.5 * std::sqrt(gamma);
  const Mat2 c1 = half * ops::lower_plus_minus;
  const Mat2 c2 = half * ops::sigma_x;
  const Mat2 c3 = half * ops::lower_minus_plus;
  const double s = sign == SidebandSign::standard ? 1.0 : -1.0;

  sideband = DiffusiveModel{};
  sideband.drift = (-gamma / 8.0) * Mat2::identity();
  sideband.channels.push_back({kI * c1 - (kI * s) * c3, 0.5 * eta});
  sideband.channels.push_back({(-1.0) * c1 - s * c3, 0.5 * eta});
  central = DiffusiveModel{};
  central.drift = (-gamma / 8.0) * Mat2::identity();
  central.channels.push_back({kI * c2, eta});
  if (unread_fraction > 0.0) {
    const double r = std::sqrt(unread_fraction);
    sideband.unread.push_back(r * c1);
    sideband.unread.push_back(r * c3);
    central.unread.push_back(r * c2);
  }
}

std::array<double, 3> secular_innovations(double eta, const NoiseIncrement& noise) {
  const double r = std::sqrt(eta);
  return {r * noise.dV_omega.real(), r * noise.dV_omega.imag(), r * noise.dW_x};
}

LabDiffusiveStepper::LabDiffusiveStepper(const DiffusiveSpec& spec, double omega, double gamma,
                                         double dt)
    : model_(lab_homodyne_model(spec, omega, gamma, dt, 1.0 - spec.eta)),
      dt_(dt),
      phi_(spec.phi()),
      has_second_channel_(model_.channels[1].efficiency > 0.0) {
  if (!has_second_channel_) model_.channels.pop_back();
}

Mat2 LabDiffusiveStepper::step(const Mat2& rho, const NoiseIncrement& noise) const {
  const C rotated = std::polar(1.0, -phi_) * noise.dZ;
  const std::array<double, 2> u{rotated.real(), rotated.imag()};
  return kraus_step(model_, rho, std::span<const double>(u.data(), model_.channels.size()), dt_);
}

SecularYStepper::SecularYStepper(double eta, double gamma, double dt, SidebandSign sign)
    : eta_(eta), dt_(dt) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("efficiency must lie in [0, 1]");
  secular_y_models(eta, gamma, 1.0 - eta, sign, sideband_, central_);
}

Mat2 SecularYStepper::step(const Mat2& rho, const NoiseIncrement& noise) const {
  const auto u = secular_innovations(eta_, noise);
  const Mat2 mid = kraus_step(sideband_, rho, std::span<const double>(u.data(), 2), dt_);
  return kraus_step(central_, mid, std::span<const double>(u.data() + 2, 1), dt_);
}

BlochState diffusive_step(const BlochState& state, const DiffusiveSpec& spec, double omega,
                          double gamma, double dt, const NoiseIncrement& noise) {
  if (spec.frame != DiffusiveFrame::lab) throw ConfigError("diffusive_step is lab-frame only");
  const LabDiffusiveStepper stepper(spec, omega, gamma, dt);
  return from_matrix(stepper.step(to_matrix(normalize(state).state), noise));
}

BlochState secular_y_step(const BlochState& state, double eta, double gamma, double dt,
                          const NoiseIncrement& noise, SidebandSign sign) {
  const SecularYStepper stepper(eta, gamma, dt, sign);
  return from_matrix(stepper.step(to_matrix(normalize(state).state), noise));
}

TrajectoryRecord run_homodyne_trajectory(const SimConfig& config, const DiffusiveSpec& spec,
                                         RandomStream& rng, std::span<const double> sample_times,
                                         const BlochState& initial, SidebandSign sign) {
  spec.validate();
  TrajectoryRecord rec;
  rec.times.assign(sample_times.begin(), sample_times.end());
  rec.samples.reserve(sample_times.size());
  if (sample_times.empty()) return rec;

  const double dt = config.dt;
  std::vector<long long> sample_steps;
  sample_steps.reserve(sample_times.size());
  for (double t : sample_times) sample_steps.push_back(std::llround(t / dt));

  Mat2 rho = to_matrix(normalize(initial).state);
  std::size_t next = 0;
  auto emit_due = [&](long long step) {
    while (next < sample_steps.size() && sample_steps[next] <= step) {
      rec.samples.push_back(from_matrix(rho));
      ++next;
    }
  };
  emit_due(0);
  const long long last = sample_steps.back();

  if (spec.frame == DiffusiveFrame::lab) {
    config.validate_lab_frame();
    const LabDiffusiveStepper stepper(spec, config.omega, config.gamma, dt);
    for (long long i = 1; i <= last; ++i) {
      rho = stepper.step(rho, sample_noise(spec, dt, rng));
      emit_due(i);
    }
  } else {
    config.validate();
    const SecularYStepper stepper(spec.eta, config.gamma, dt, sign);
    for (long long i = 1; i <= last; ++i) {
      rho = stepper.step(rho, sample_noise(spec, dt, rng));
      emit_due(i);
    }
  }
  return rec;
}

}  // namespace qjumps
