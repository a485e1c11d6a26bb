#pragma once
// Reference implementations used only by the tests. They share no code with the
// library: plain arrays of std::complex and textbook formulas.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using C = std::complex<double>;
using M = std::array<std::array<C, 2>, 2>;  // basis (|e>, |g>)

inline M mul(const M& a, const M& b) {
  M r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}
inline M dag(const M& a) {
  M r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = std::conj(a[j][i]);
  return r;
}
inline M add(const M& a, const M& b, C s = 1.0) {
  M r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + s * b[i][j];
  return r;
}
inline M scale(C s, const M& a) {
  M r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = s * a[i][j];
  return r;
}

inline M identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
inline M sx() { return {{{0.0, 1.0}, {1.0, 0.0}}}; }
inline M sy() { return {{{0.0, C(0, -1)}, {C(0, 1), 0.0}}}; }
inline M sz() { return {{{1.0, 0.0}, {0.0, -1.0}}}; }
inline M sminus() { return {{{0.0, 0.0}, {1.0, 0.0}}}; }  // |g><e|
// |±> = (|e> ± |g>)/√2
inline M ket_bra(int s_out, int s_in) {
  M r{};
  const double v_out[2] = {1.0 / std::sqrt(2.0), s_out / std::sqrt(2.0)};
  const double v_in[2] = {1.0 / std::sqrt(2.0), s_in / std::sqrt(2.0)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = v_out[i] * v_in[j];
  return r;
}

inline M rho_of(double w, double x, double y, double z) {
  return scale(0.5, add(add(add(scale(w, identity()), scale(x, sx())), scale(y, sy())), scale(z, sz())));
}
inline std::array<double, 4> bloch_of(const M& r) {
  auto tr = [&](const M& op) { return (mul(op, r)[0][0] + mul(op, r)[1][1]).real(); };
  return {tr(identity()), tr(sx()), tr(sy()), tr(sz())};
}

inline M dissipator(const M& c, const M& r) {
  const M cdc = mul(dag(c), c);
  return add(mul(mul(c, r), dag(c)), add(mul(cdc, r), mul(r, cdc)), -0.5);
}
inline M sandwich(const M& c, const M& r) { return mul(mul(c, r), dag(c)); }

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
