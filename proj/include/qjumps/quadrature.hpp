#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "qjumps/errors.hpp"

namespace qjumps {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Segment kronrod15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (G7/K15) on a finite interval. Bisects the
/// segment with the largest error estimate until the summed estimate is within
/// max(abs_tol, rel_tol·|I|).
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                     int max_intervals = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Segment> heap;
  const detail::Segment first = detail::kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      throw DomainError("integrate: subdivision limit reached before tolerance");
    }
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Segment left = detail::kronrod15(f, worst.a, mid);
    const detail::Segment right = detail::kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // The running sums drift after many updates; resum occasionally.
    if (intervals % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, error, intervals};
}

/// ∫_0^∞ f(t) dt for integrands decaying at least like exp(−rate·t), through
/// t = −ln(1 − s)/rate so the tail maps onto a bounded integrand on [0, 1).
template <class F>
QuadResult integrate_decaying(const F& f, double rate, double abs_tol, double rel_tol = 0.0) {
  if (!(rate > 0.0)) throw DomainError("integrate_decaying: rate must be positive");
  auto mapped = [&](double s) {
    if (s >= 1.0) return 0.0;
    const double one_minus = 1.0 - s;
    const double t = -std::log(one_minus) / rate;
    return f(t) / (rate * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, abs_tol, rel_tol);
}

/// Bisection for a sign change of f on [lo, hi] down to |hi − lo| ≤ rel_tol·max(1, |x|).
template <class F>
double bisect(const F& f, double lo, double hi, double rel_tol = 1e-12, int max_iter = 400) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qjumps
