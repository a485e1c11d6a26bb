#pragma once

#include <complex>

namespace qjumps {

/// Roundoff allowance on |r| ≤ w.
inline constexpr double kPositivityTolerance = 1e-9;
/// Overshoot beyond which a state is treated as a bug, not roundoff.
inline constexpr double kClampLimit = 1e-6;

/// Qubit density operator ρ = (w·I + x σx + y σy + z σz) / 2, possibly unnormalized.
struct BlochState {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr BlochState ground() { return {1.0, 0.0, 0.0, -1.0}; }
  static constexpr BlochState excited() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr BlochState maximally_mixed() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr BlochState plus() { return {1.0, 1.0, 0.0, 0.0}; }
  static constexpr BlochState minus() { return {1.0, -1.0, 0.0, 0.0}; }

  double vector_norm_sq() const { return x * x + y * y + z * z; }
  bool is_normalized(double tol = kPositivityTolerance) const;
  bool is_positive(double tol = kPositivityTolerance) const;

  BlochState& operator+=(const BlochState& o) {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend BlochState operator+(BlochState a, const BlochState& b) { return a += b; }
  friend BlochState operator*(double s, BlochState a) {
    a.w *= s;
    a.x *= s;
    a.y *= s;
    a.z *= s;
    return a;
  }
  friend bool operator==(const BlochState&, const BlochState&) = default;
};

/// Time derivative of a BlochState under some generator.
using BlochDerivative = BlochState;

enum class JumpKind {
  lower_plus_minus,  // |−⟩⟨+|
  lower_minus_plus,  // |+⟩⟨−|
  sigma_x,
  projector_plus,    // σx + 1
  projector_minus,   // σx − 1
  sigma_minus,
};

struct JumpOperator {
  JumpKind kind;
  double scale = 1.0;
};

struct SteeringFunctionals {
  double f1 = 0.0;  // ⟨σx⟩²
  double f2 = 0.0;  // ⟨σy⟩² + ⟨σz⟩²
};

struct Normalized {
  BlochState state;
  double weight;
};

SteeringFunctionals steering_functionals(const BlochState& state);

/// Unnormalized post-jump state scale²·ĉρĉ†.
BlochState apply_jump(const BlochState& state, const JumpOperator& op);

/// Throws DegenerateStateError when w ≤ 0.
Normalized normalize(const BlochState& state);

/// Applies the positivity policy in place: overshoot below kClampLimit (relative to w)
/// is projected back onto the ball, anything larger throws PositivityError.
void enforce_positivity(BlochState& state);

/// Dense 2×2 complex matrix in the σz eigenbasis ordered (|e⟩, |g⟩).
struct Mat2 {
  using C = std::complex<double>;
  C a{}, b{}, c{}, d{};  // [[a, b], [c, d]]

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  Mat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
  C trace() const { return a + d; }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
  }
  friend Mat2 operator+(const Mat2& l, const Mat2& r) {
    return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
  }
  friend Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
  }
  friend Mat2 operator*(C s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
};

namespace ops {
inline constexpr Mat2 sigma_x{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma_y{0.0, Mat2::C{0.0, -1.0}, Mat2::C{0.0, 1.0}, 0.0};
inline constexpr Mat2 sigma_z{1.0, 0.0, 0.0, -1.0};
inline constexpr Mat2 sigma_minus{0.0, 0.0, 1.0, 0.0};
inline constexpr Mat2 lower_plus_minus{0.5, 0.5, -0.5, -0.5};   // |−⟩⟨+|
inline constexpr Mat2 lower_minus_plus{0.5, -0.5, 0.5, -0.5};   // |+⟩⟨−|
inline constexpr Mat2 projector_plus{0.5, 0.5, 0.5, 0.5};       // |+⟩⟨+|
inline constexpr Mat2 projector_minus{0.5, -0.5, -0.5, 0.5};    // |−⟩⟨−|
}  // namespace ops

Mat2 to_matrix(const BlochState& s);
/// Reads the Hermitian part of m; anti-Hermitian roundoff is discarded.
BlochState from_matrix(const Mat2& m);
Mat2 jump_matrix(JumpKind kind);

/// m ρ m† for ρ given as a matrix.
inline Mat2 sandwich(const Mat2& m, const Mat2& rho) { return m * rho * m.adjoint(); }

}  // namespace qjumps
