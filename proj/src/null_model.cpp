#include "qjumps/null_model.hpp"

#include <algorithm>
#include <cmath>

#include "qjumps/errors.hpp"
#include "qjumps/homodyne.hpp"
#include "qjumps/kraus.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/parallel.hpp"
#include "qjumps/said.hpp"

namespace qjumps {

namespace {

using C = std::complex<double>;
constexpr C kI{0.0, 1.0};

std::array<double, 2> xlabel(const BlochState& s) { return {std::clamp(s.x, -1.0, 1.0), 0.0}; }
std::array<double, 2> yzlabel(const BlochState& s) {
  return {std::clamp(s.y, -1.0, 1.0), std::clamp(s.z, -1.0, 1.0)};
}

Mat2 pure(int sign) { return sign > 0 ? ops::projector_plus : Mat2::identity() - ops::projector_plus; }

// SAID detector (η_S) plus secular Y-homodyne (η_Y) on the same atom.
std::vector<NullSample> run_said_y(double eta_s, double eta_y, double dt,
                                   std::span<const double> times, RandomStream& rng) {
  const double gamma = 1.0;
  const double half = 0.5 * std::sqrt(gamma);
  const Mat2 c1 = half * ops::lower_plus_minus;
  const Mat2 c2 = half * ops::sigma_x;
  const Mat2 c3 = half * ops::lower_minus_plus;

  // True-state model: Y channels measured, SAID share removed from the no-jump
  // drift (its clicks are sampled explicitly), remainder unread.
  DiffusiveModel truth[2];
  for (int k = 0; k < 2; ++k) {
    const int lo = k == 0 ? +1 : -1;
    DiffusiveModel& m = truth[k];
    const Mat2 pi_lo = pure(lo);
    m.drift = (-0.5 * (gamma / 4.0) * (2.0 - eta_s)) * Mat2::identity() + (-0.5 * eta_s * gamma) * pi_lo;
    m.channels.push_back({kI * c1 - kI * c3, 0.5 * eta_y});
    m.channels.push_back({(-1.0) * c1 - c3, 0.5 * eta_y});
    m.channels.push_back({kI * c2, eta_y});
    const double rest = std::max(0.0, 1.0 - eta_s - eta_y);
    if (rest > 0.0) {
      const double r = std::sqrt(rest);
      m.unread = {r * c1, r * c2, r * c3};
    }
  }
  DiffusiveModel y_side, y_central;
  secular_y_models(eta_y, gamma, 1.0 - eta_y, SidebandSign::standard, y_side, y_central);
  const NoJumpPropagator prop(eta_s, gamma);
  const DiffusiveSpec yspec = DiffusiveSpec::secular_y(eta_y);

  Mat2 rho = ops::projector_plus;
  Mat2 rho_y = ops::projector_plus;
  int lo = +1;
  double t_last = 0.0;

  std::vector<NullSample> out;
  out.reserve(times.size());
  std::size_t next = 0;
  const long long last = std::llround(times.back() / dt);
  for (long long i = 0;; ++i) {
    const double t = i * dt;
    while (next < times.size() && std::llround(times[next] / dt) <= i) {
      const auto pops = prop.evolve(1.0, 0.0, t - t_last);
      const double xs = lo * (pops.matched - pops.other) / (pops.matched + pops.other);
      NullSample s;
      s.state = from_matrix(rho);
      s.label_a = {std::clamp(xs, -1.0, 1.0), 0.0};
      s.label_b = yzlabel(from_matrix(rho_y));
      s.time = times[next];
      out.push_back(s);
      ++next;
    }
    if (i == last) break;

    const DiffusiveModel& model = truth[lo > 0 ? 0 : 1];
    const auto u = secular_innovations(eta_y, sample_noise(yspec, dt, rng));
    std::array<double, 3> rec{};
    records_from_innovations(model, rho, u, dt, rec);

    const BlochState b = from_matrix(rho);
    const double p_plus = 0.5 * (1.0 + b.x), p_minus = 0.5 * (1.0 - b.x);
    const double rate_side_minus = eta_s * gamma / 4.0 * p_plus;
    const double rate_central = eta_s * gamma * (lo > 0 ? p_plus : p_minus);
    const double rate_side_plus = eta_s * gamma / 4.0 * p_minus;
    const double total = rate_side_minus + rate_central + rate_side_plus;
    const double draw = rng.uniform();
    if (draw < total * dt) {
      const double pick = draw / dt;
      const SaidChannel ch = pick < rate_side_minus                  ? SaidChannel::side_minus
                             : pick < rate_side_minus + rate_central ? SaidChannel::central
                                                                     : SaidChannel::side_plus;
      lo = said_post_state(ch, lo);
      t_last = t + dt;
      rho = pure(lo);
    } else {
      rho = renormalize(kraus_update(model, rho, rec, dt));
    }
    rho_y = renormalize(kraus_update(y_side, rho_y, std::span<const double>(rec.data(), 2), dt));
    rho_y = renormalize(kraus_update(y_central, rho_y, std::span<const double>(rec.data() + 2, 1), dt));
  }
  return out;
}

// Lab-frame X- and Y-homodyne on the same fluorescence, split by a beam splitter.
std::vector<NullSample> run_x_y(double eta_x, double eta_y, double omega, double dt,
                                std::span<const double> times, RandomStream& rng) {
  const double gamma = 1.0;
  const auto xspec = DiffusiveSpec::x_homodyne(eta_x);
  const auto yspec = DiffusiveSpec::y_homodyne(eta_y);
  const DiffusiveModel mx = lab_homodyne_model(xspec, omega, gamma, dt, 1.0 - eta_x);
  const DiffusiveModel my = lab_homodyne_model(yspec, omega, gamma, dt, 1.0 - eta_y);
  DiffusiveModel truth = lab_homodyne_model(xspec, omega, gamma, dt, 0.0);
  {
    const DiffusiveModel y0 = lab_homodyne_model(yspec, omega, gamma, dt, 0.0);
    truth.channels.insert(truth.channels.end(), y0.channels.begin(), y0.channels.end());
    const double rest = std::max(0.0, 1.0 - eta_x - eta_y);
    if (rest > 0.0) truth.unread.push_back(std::sqrt(rest * gamma) * ops::sigma_minus);
  }

  Mat2 rho = to_matrix(BlochState::ground());
  Mat2 rho_x = rho, rho_y = rho;
  std::vector<NullSample> out;
  out.reserve(times.size());
  std::size_t next = 0;
  const long long last = std::llround(times.back() / dt);
  for (long long i = 0;; ++i) {
    while (next < times.size() && std::llround(times[next] / dt) <= i) {
      NullSample s;
      s.state = from_matrix(rho);
      s.label_a = xlabel(from_matrix(rho_x));
      s.label_b = yzlabel(from_matrix(rho_y));
      s.time = times[next];
      out.push_back(s);
      ++next;
    }
    if (i == last) break;
    const auto ux = lab_innovations(xspec, sample_noise(xspec, dt, rng));
    const auto uy = lab_innovations(yspec, sample_noise(yspec, dt, rng));
    const std::array<double, 4> u{ux[0], ux[1], uy[0], uy[1]};
    std::array<double, 4> rec{};
    records_from_innovations(truth, rho, u, dt, rec);
    rho = renormalize(kraus_update(truth, rho, rec, dt));
    rho_x = renormalize(kraus_update(mx, rho_x, std::span<const double>(rec.data(), 2), dt));
    rho_y = renormalize(kraus_update(my, rho_y, std::span<const double>(rec.data() + 2, 2), dt));
  }
  return out;
}

}  // namespace

std::vector<NullSample> run_null_trajectory(Pair pair, double eta_a, double eta_b, double omega,
                                            double dt, std::span<const double> sample_times,
                                            RandomStream& rng) {
  if (!(eta_a >= 0.0 && eta_b >= 0.0 && eta_a + eta_b <= 1.0 + 1e-12)) {
    throw ConfigError("null model needs eta_a, eta_b >= 0 with eta_a + eta_b <= 1");
  }
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (sample_times.empty()) return {};
  if (pair == Pair::said_y) return run_said_y(eta_a, eta_b, dt, sample_times, rng);
  SimConfig cfg;
  cfg.omega = omega;
  cfg.dt = dt;
  cfg.validate_lab_frame();
  return run_x_y(eta_a, eta_b, omega, dt, sample_times, rng);
}

NullEnsembles build_null_ensembles(Pair pair, double eta_a, double eta_b, double omega,
                                   const EnsembleOptions& options) {
  if (options.mode != SamplingMode::time_sampled) {
    throw ConfigError("the null model uses time-sampled ensembles");
  }
  if (options.n_records == 0 || options.n_per_axis < 2) throw ConfigError("bad ensemble size");
  const std::size_t per = std::max<std::size_t>(1, options.records_per_trajectory);
  const std::size_t n_traj = (options.n_records + per - 1) / per;
  const double dt = scheme_dt(scheme_b(pair), omega, options.dt);

  NullEnsembles e;
  e.a.scheme = scheme_a(pair);
  e.b.scheme = scheme_b(pair);
  e.a.eta = eta_a;
  e.b.eta = eta_b;
  e.a.omega = e.b.omega = omega;
  e.a.records.resize(options.n_records);
  e.b.records.resize(options.n_records);
  static constexpr std::array<Axis, 3> kAll{Axis::x, Axis::y, Axis::z};

  parallel_for(n_traj, options.workers, [&](std::size_t j) {
    const std::size_t count = std::min(per, options.n_records - j * per);
    const auto times = stationary_schedule(options.burn_in, options.stride, count);
    RandomStream rng = substream(options.seed, stream_tag::null_model, j);
    const auto samples = run_null_trajectory(pair, eta_a, eta_b, omega, dt, times, rng);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t idx = j * per + k;
      for (int side = 0; side < 2; ++side) {
        EnsembleRecord& r = (side == 0 ? e.a : e.b).records[idx];
        r.state = samples[k].state;
        r.label = side == 0 ? samples[k].label_a : samples[k].label_b;
        r.halt_time = samples[k].time;
        r.trajectory = static_cast<std::uint32_t>(j);
        RandomStream bob = substream(options.seed, stream_tag::bob, 2 * idx + side);
        const auto o = simulate_bob_outcomes(r.state, kAll, options.n_per_axis, bob);
        for (int a = 0; a < 3; ++a) r.bob[a] = tally(o.outcomes[a]);
      }
    }
  });
  return e;
}

SteeringResult null_model_steering(Pair pair, double eta_a, double eta_b, double omega,
                                   const EnsembleOptions& options,
                                   const BootstrapOptions& bootstrap) {
  const auto e = build_null_ensembles(pair, eta_a, eta_b, omega, options);
  auto r = steering_sum(e.a, e.b, bootstrap);
  r.scheme_pair = to_string(pair);
  return r;
}

}  // namespace qjumps
