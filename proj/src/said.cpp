#include "qjumps/said.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qjumps/errors.hpp"
#include "qjumps/quadrature.hpp"

namespace qjumps {

SaidState SaidState::from_bloch(const BlochState& s) {
  const Normalized n = normalize(s);
  SaidState out;
  out.w_plus = 0.5 * (1.0 + n.state.x);
  out.w_minus = 0.5 * (1.0 - n.state.x);
  out.lo_sign = out.w_minus > out.w_plus ? -1 : +1;
  return out;
}

SaidDerivative nojump_derivative(const SaidState& s, double eta, double gamma) {
  const double a = s.lo_sign > 0 ? s.w_plus : s.w_minus;
  const double b = s.lo_sign > 0 ? s.w_minus : s.w_plus;
  const double da = -gamma * (0.25 + eta) * a + 0.25 * gamma * (1.0 - eta) * b;
  const double db = 0.25 * gamma * (1.0 - eta) * a - 0.25 * gamma * b;
  return s.lo_sign > 0 ? SaidDerivative{da, db} : SaidDerivative{db, da};
}

NoJumpPropagator::NoJumpPropagator(double eta, double gamma) : eta_(eta), gamma_(gamma) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("SAID efficiency must lie in [0, 1]");
  const double p = -gamma * (0.25 + eta);
  const double q = 0.25 * gamma * (1.0 - eta);
  const double r = -0.25 * gamma;
  const double theta = 0.5 * std::atan2(2.0 * q, p - r);
  cos_ = std::cos(theta);
  sin_ = std::sin(theta);
  // v1 = (cos, sin), v2 = (−sin, cos)
  const double l1 = p * cos_ * cos_ + 2.0 * q * sin_ * cos_ + r * sin_ * sin_;
  const double l2 = p * sin_ * sin_ - 2.0 * q * sin_ * cos_ + r * cos_ * cos_;
  lambda_slow_ = l1;
  lambda_fast_ = l2;
}

NoJumpPropagator::Populations NoJumpPropagator::evolve(double a0, double b0, double tau) const {
  const double c1 = cos_ * a0 + sin_ * b0;
  const double c2 = -sin_ * a0 + cos_ * b0;
  const double e1 = c1 * std::exp(lambda_slow_ * tau);
  const double e2 = c2 * std::exp(lambda_fast_ * tau);
  return {cos_ * e1 - sin_ * e2, sin_ * e1 + cos_ * e2};
}

double NoJumpPropagator::survival(double a0, double b0, double tau) const {
  const Populations p = evolve(a0, b0, tau);
  return p.matched + p.other;
}

double NoJumpPropagator::jump_density(double a0, double b0, double tau) const {
  const Populations p = evolve(a0, b0, tau);
  return 0.25 * gamma_ * eta_ * (5.0 * p.matched + p.other);
}

double NoJumpPropagator::mean_waiting_time(double a0, double b0) const {
  const double c1 = cos_ * a0 + sin_ * b0;
  const double c2 = -sin_ * a0 + cos_ * b0;
  const double s1 = c1 * (cos_ + sin_);
  const double s2 = c2 * (cos_ - sin_);
  auto term = [](double weight, double lambda) {
    if (weight == 0.0) return 0.0;
    if (lambda >= 0.0) return std::numeric_limits<double>::infinity();
    return weight / -lambda;
  };
  return term(s1, lambda_slow_) + term(s2, lambda_fast_);
}

int said_post_state(SaidChannel channel, int lo_sign) {
  switch (channel) {
    case SaidChannel::side_minus:
      return -1;
    case SaidChannel::side_plus:
      return +1;
    case SaidChannel::central:
      return lo_sign;
  }
  return lo_sign;
}

namespace {

struct SegmentStart {
  double matched;
  double other;
};

SegmentStart matched_basis(const SaidState& s) {
  const double tr = s.trace();
  if (!(tr > 0.0)) throw DegenerateStateError("SAID state has zero trace");
  const double a = (s.lo_sign > 0 ? s.w_plus : s.w_minus) / tr;
  const double b = (s.lo_sign > 0 ? s.w_minus : s.w_plus) / tr;
  return {a, b};
}

WaitingTime draw(const NoJumpPropagator& prop, SegmentStart start, int lo_sign,
                 RandomStream& rng) {
  if (prop.eta() == 0.0) {
    return {std::numeric_limits<double>::infinity(), SaidChannel::central, true};
  }
  const double target = rng.uniform_open();
  auto excess = [&](double tau) { return prop.survival(start.matched, start.other, tau) - target; };
  double hi = 1.0 / prop.slowest_rate();
  while (excess(hi) > 0.0) hi *= 2.0;
  const double tau = bisect(excess, 0.0, hi, 1e-12);

  const auto pop = prop.evolve(start.matched, start.other, tau);
  const double quarter = 0.25 * prop.eta();
  const double flip = quarter * pop.matched;
  const double central = 4.0 * quarter * pop.matched;
  const double same_side = quarter * pop.other;
  const double pick = rng.uniform() * (flip + central + same_side);
  SaidChannel channel;
  if (pick < flip) {
    channel = lo_sign > 0 ? SaidChannel::side_minus : SaidChannel::side_plus;
  } else if (pick < flip + central) {
    channel = SaidChannel::central;
  } else {
    channel = lo_sign > 0 ? SaidChannel::side_plus : SaidChannel::side_minus;
  }
  return {tau, channel, false};
}

}  // namespace

WaitingTime sample_waiting_time(const SaidState& s0, double eta, RandomStream& rng, double gamma) {
  const NoJumpPropagator prop(eta, gamma);
  return draw(prop, matched_basis(s0), s0.lo_sign, rng);
}

TrajectoryRecord run_said_trajectory(const SimConfig& config, double eta, RandomStream& rng,
                                     std::span<const double> sample_times,
                                     const SaidState& initial, bool keep_jumps) {
  config.validate();
  const NoJumpPropagator prop(eta, config.gamma);
  TrajectoryRecord rec;
  rec.times.assign(sample_times.begin(), sample_times.end());
  rec.samples.reserve(sample_times.size());
  if (sample_times.empty()) return rec;
  const double t_end = sample_times.back();

  SegmentStart start = matched_basis(initial);
  int lo = initial.lo_sign;
  double seg_start = 0.0;
  std::size_t next = 0;

  auto x_at = [&](double tau) {
    const auto p = prop.evolve(start.matched, start.other, tau);
    return lo * (p.matched - p.other) / (p.matched + p.other);
  };

  while (next < sample_times.size()) {
    const WaitingTime wt = draw(prop, start, lo, rng);
    const double t_jump = seg_start + wt.tau;
    while (next < sample_times.size() && sample_times[next] < t_jump) {
      rec.samples.push_back({1.0, x_at(sample_times[next] - seg_start), 0.0, 0.0});
      ++next;
    }
    if (wt.never || t_jump > t_end) break;
    const int post = said_post_state(wt.channel, lo);
    if (keep_jumps) rec.jumps.push_back({t_jump, wt.channel, post, x_at(wt.tau)});
    ++rec.jump_count;
    lo = post;
    start = {1.0, 0.0};
    seg_start = t_jump;
  }
  return rec;
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("SAID purity needs 0 < eta <= 1 (the eta -> 0 limit is 0)");
  }
}

}  // namespace

double said_ex2_analytic(double eta, double tol) {
  check_eta(eta);
  const NoJumpPropagator prop(eta);
  const double mean_wait = prop.mean_waiting_time(1.0, 0.0);
  auto weighted = [&](double tau) {
    const auto p = prop.evolve(1.0, 0.0, tau);
    const double d = p.matched - p.other;
    return d * d / (p.matched + p.other);
  };
  const QuadResult num = integrate_decaying(weighted, 0.5 * prop.slowest_rate(), 0.25 * tol * mean_wait);
  return std::clamp(num.value / mean_wait, 0.0, 1.0);
}

double said_ex2_jump_sampled(double eta, double tol) {
  check_eta(eta);
  const NoJumpPropagator prop(eta);
  auto integrand = [&](double tau) {
    const auto p = prop.evolve(1.0, 0.0, tau);
    const double s = p.matched + p.other;
    const double x = (p.matched - p.other) / s;
    return x * x * 0.25 * eta * (5.0 * p.matched + p.other);
  };
  const QuadResult r = integrate_decaying(integrand, 0.5 * prop.slowest_rate(), 0.5 * tol);
  return std::clamp(r.value, 0.0, 1.0);
}

}  // namespace qjumps
