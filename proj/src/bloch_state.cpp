#include "qjumps/bloch_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qjumps/errors.hpp"

namespace qjumps {

bool BlochState::is_normalized(double tol) const { return std::abs(w - 1.0) <= tol; }

bool BlochState::is_positive(double tol) const {
  return w >= -tol && std::sqrt(vector_norm_sq()) <= w + tol * std::max(1.0, w);
}

SteeringFunctionals steering_functionals(const BlochState& state) {
  if (!state.is_normalized()) {
    throw DegenerateStateError("steering_functionals: state is not normalized (w = " +
                               std::to_string(state.w) + ")");
  }
  return {state.x * state.x, state.y * state.y + state.z * state.z};
}

Mat2 jump_matrix(JumpKind kind) {
  switch (kind) {
    case JumpKind::lower_plus_minus:
      return ops::lower_plus_minus;
    case JumpKind::lower_minus_plus:
      return ops::lower_minus_plus;
    case JumpKind::sigma_x:
      return ops::sigma_x;
    case JumpKind::projector_plus:
      return ops::sigma_x + Mat2::identity();
    case JumpKind::projector_minus:
      return ops::sigma_x - Mat2::identity();
    case JumpKind::sigma_minus:
      return ops::sigma_minus;
  }
  return Mat2::identity();
}

Mat2 to_matrix(const BlochState& s) {
  using C = Mat2::C;
  return {C{0.5 * (s.w + s.z), 0.0}, C{0.5 * s.x, -0.5 * s.y}, C{0.5 * s.x, 0.5 * s.y},
          C{0.5 * (s.w - s.z), 0.0}};
}

BlochState from_matrix(const Mat2& m) {
  return {m.a.real() + m.d.real(), m.b.real() + m.c.real(), m.c.imag() - m.b.imag(),
          m.a.real() - m.d.real()};
}

BlochState apply_jump(const BlochState& state, const JumpOperator& op) {
  const Mat2 c = op.scale * jump_matrix(op.kind);
  return from_matrix(sandwich(c, to_matrix(state)));
}

Normalized normalize(const BlochState& state) {
  if (!(state.w > 0.0)) {
    throw DegenerateStateError("normalize: trace is not positive (w = " +
                               std::to_string(state.w) + ")");
  }
  const double inv = 1.0 / state.w;
  return {{1.0, state.x * inv, state.y * inv, state.z * inv}, state.w};
}

void enforce_positivity(BlochState& state) {
  const double r = std::sqrt(state.vector_norm_sq());
  const double w = state.w;
  if (w < -kClampLimit) {
    throw PositivityError("negative trace " + std::to_string(w));
  }
  if (r <= w) return;
  const double overshoot = (r - w) / std::max(w, 1e-300);
  if (overshoot > kClampLimit) {
    throw PositivityError("Bloch vector outside the ball by relative " +
                          std::to_string(overshoot));
  }
  const double s = w / r;
  state.x *= s;
  state.y *= s;
  state.z *= s;
}

}  // namespace qjumps
