#include "qjumps/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qjumps/errors.hpp"

namespace qjumps {

void SimConfig::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
  if (!(omega >= 0.0)) throw ConfigError("omega must be non-negative");
}

void SimConfig::validate_lab_frame() const {
  validate();
  const double limit = 1e-2 / std::max(1.0, omega);
  if (dt > limit * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + std::to_string(dt) + " does not resolve the Rabi frequency (need dt <= " +
                      std::to_string(limit) + ")");
  }
}

double default_lab_dt(double omega) { return std::min(1e-3, 1e-2 / std::max(1.0, omega)); }

BlochDerivative exact_liouvillian(const BlochState& s, double omega, double gamma) {
  return {0.0, -0.5 * gamma * s.x, -0.5 * gamma * s.y - omega * s.z,
          omega * s.y - gamma * (s.z + s.w)};
}

BlochDerivative secular_liouvillian(const BlochState& s, double gamma) {
  return {0.0, -0.5 * gamma * s.x, -0.75 * gamma * s.y, -0.75 * gamma * s.z};
}

BlochState exact_steady_state(double omega, double gamma) {
  const double den = gamma * gamma + 2.0 * omega * omega;
  return {1.0, 0.0, 2.0 * omega * gamma / den, -gamma * gamma / den};
}

namespace {

BlochDerivative generator(const BlochState& s, const SimConfig& c, Frame frame) {
  return frame == Frame::lab ? exact_liouvillian(s, c.omega, c.gamma)
                             : secular_liouvillian(s, c.gamma);
}

BlochState rk4_step(const BlochState& s, double h, const SimConfig& c, Frame frame) {
  const BlochDerivative k1 = generator(s, c, frame);
  const BlochDerivative k2 = generator(s + (0.5 * h) * k1, c, frame);
  const BlochDerivative k3 = generator(s + (0.5 * h) * k2, c, frame);
  const BlochDerivative k4 = generator(s + h * k3, c, frame);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

BlochState advance(BlochState s, double duration, const SimConfig& c, Frame frame) {
  if (duration <= 0.0) return s;
  const auto steps = static_cast<long long>(std::ceil(duration / c.dt - 1e-9));
  const double h = duration / static_cast<double>(steps);
  for (long long i = 0; i < steps; ++i) {
    s = rk4_step(s, h, c, frame);
    try {
      enforce_positivity(s);
    } catch (const PositivityError& e) {
      throw PositivityError(std::string("integrator step too large: ") + e.what());
    }
  }
  return s;
}

}  // namespace

BlochState propagate_me(const BlochState& state, const SimConfig& config, Frame frame) {
  config.validate();
  return advance(state, config.t_final, config, frame);
}

std::vector<BlochState> propagate_me_at(const BlochState& state, const SimConfig& config,
                                        Frame frame, std::span<const double> times) {
  config.validate();
  std::vector<BlochState> out;
  out.reserve(times.size());
  BlochState s = state;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw ConfigError("propagate_me_at: times must be ascending");
    s = advance(s, target - t, config, frame);
    t = target;
    out.push_back(s);
  }
  return out;
}

BlochState to_rotating_frame(const BlochState& lab, double omega, double t) {
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  return {lab.w, lab.x, lab.y * c + lab.z * s, lab.z * c - lab.y * s};
}

}  // namespace qjumps
