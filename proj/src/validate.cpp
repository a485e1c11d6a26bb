#include "qjumps/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qjumps/beta_oracle.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/homodyne.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/null_model.hpp"
#include "qjumps/said.hpp"
#include "qjumps/stats.hpp"

namespace qjumps {

namespace {

BlochState random_ball_state(RandomStream& rng) {
  const double u = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double r = std::cbrt(rng.uniform());
  const double s = std::sqrt(1.0 - u * u);
  return {1.0, r * s * std::cos(phi), r * s * std::sin(phi), r * u};
}

CheckResult bounded(std::string name, double discrepancy, double tolerance, std::string detail = {}) {
  return {std::move(name), discrepancy <= tolerance, discrepancy, tolerance, std::move(detail)};
}

SidebandSign sign_of(const RunConfig& c) {
  return c.sideband_sign == "flipped" ? SidebandSign::flipped : SidebandSign::standard;
}

void functional_checks(std::vector<CheckResult>& out, std::uint64_t seed) {
  RandomStream rng = substream(seed, stream_tag::validate, 1);
  double worst_bound = 0.0, worst_f1 = 0.0, worst_f2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const BlochState a = random_ball_state(rng), b = random_ball_state(rng);
    const double lam = rng.uniform();
    const auto fa = steering_functionals(a), fb = steering_functionals(b);
    const auto fm = steering_functionals((1.0 - lam) * a + lam * b);
    worst_bound = std::max(worst_bound, fa.f1 + fa.f2 - 1.0);
    worst_f1 = std::max(worst_f1, fm.f1 - ((1.0 - lam) * fa.f1 + lam * fb.f1));
    worst_f2 = std::max(worst_f2, fm.f2 - ((1.0 - lam) * fa.f2 + lam * fb.f2));
  }
  out.push_back(bounded("functional_bound_f1_plus_f2", worst_bound, 1e-12));
  out.push_back(bounded("convexity_f1", worst_f1, 1e-12));
  out.push_back(bounded("convexity_f2", worst_f2, 1e-12));
}

// Full matrix form of the SAID no-jump generator acting on x-diagonal states.
void said_closure_check(std::vector<CheckResult>& out, std::uint64_t seed) {
  RandomStream rng = substream(seed, stream_tag::validate, 2);
  const Mat2 c1 = 0.5 * ops::lower_plus_minus, c3 = 0.5 * ops::lower_minus_plus;
  const Mat2 c2 = 0.5 * ops::sigma_x;
  auto D = [](const Mat2& c, const Mat2& r) {
    const Mat2 cdc = c.adjoint() * c;
    return c * r * c.adjoint() - 0.5 * (cdc * r + r * cdc);
  };
  double worst_plane = 0.0, worst_x = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double eta = rng.uniform();
    const int lo = rng.uniform() < 0.5 ? +1 : -1;
    const double wp = rng.uniform(), wm = rng.uniform();
    const SaidState s{wp, wm, lo, 0.0};
    const Mat2 rho = to_matrix(s.bloch());
    const Mat2 pi_lo = lo > 0 ? ops::projector_plus : Mat2::identity() - ops::projector_plus;
    Mat2 gen = D(c1, rho) + D(c2, rho) + D(c3, rho);
    gen = gen - eta * (c1 * rho * c1.adjoint() + pi_lo * rho * pi_lo + c3 * rho * c3.adjoint());
    const BlochState g = from_matrix(gen);
    const auto ref = nojump_derivative(s, eta);
    worst_plane = std::max({worst_plane, std::abs(g.y), std::abs(g.z)});
    worst_x = std::max({worst_x, std::abs(0.5 * (g.w + g.x) - ref.dw_plus),
                        std::abs(0.5 * (g.w - g.x) - ref.dw_minus)});
  }
  out.push_back(bounded("said_x_diagonal_closure", worst_plane, 1e-14));
  out.push_back(bounded("said_nojump_matrix_vs_closed_form", worst_x, 1e-14));
}

void confinement_check(std::vector<CheckResult>& out, const RunConfig& cfg) {
  const double dt = cfg.dt > 0.0 ? cfg.dt : kDefaultSecularDt;
  double worst = 0.0;
  std::string detail;
  try {
    for (int k = 0; k < 10; ++k) {
      RandomStream rng = substream(cfg.seed, stream_tag::validate, 100 + k);
      BlochState s = random_ball_state(rng);
      s.x = 0.0;
      const SecularYStepper stepper(0.3 + 0.07 * k, 1.0, dt, sign_of(cfg));
      const auto spec = DiffusiveSpec::secular_y(stepper.eta());
      Mat2 rho = to_matrix(s);
      for (int i = 0; i < static_cast<int>(10.0 / dt); ++i) {
        rho = stepper.step(rho, sample_noise(spec, dt, rng));
        worst = std::max(worst, std::abs(from_matrix(rho).x));
      }
    }
  } catch (const std::exception& e) {
    worst = 1.0;
    detail = e.what();
  }
  out.push_back(bounded("secular_y_x0_confinement", worst, 1e-12, detail));
}

std::vector<Scheme> all_schemes() {
  return {Scheme::said, Scheme::x_lab, Scheme::y_lab, Scheme::y_secular};
}

// Runs `n` trajectories of a scheme from its standard initial state and returns
// the samples at `times`.
std::vector<std::vector<BlochState>> scheme_runs(Scheme scheme, double eta, const RunConfig& cfg,
                                                 std::span<const double> times, int n,
                                                 std::uint64_t tag_offset) {
  SimConfig sc;
  sc.omega = cfg.omega;
  sc.dt = scheme_dt(scheme, cfg.omega, cfg.dt);
  std::vector<std::vector<BlochState>> runs;
  for (int j = 0; j < n; ++j) {
    RandomStream rng = substream(cfg.seed, stream_tag::validate, tag_offset + j);
    TrajectoryRecord r;
    switch (scheme) {
      case Scheme::said:
        r = run_said_trajectory(sc, eta, rng, times);
        break;
      case Scheme::x_lab:
        r = run_homodyne_trajectory(sc, DiffusiveSpec::x_homodyne(eta), rng, times);
        break;
      case Scheme::y_lab:
        r = run_homodyne_trajectory(sc, DiffusiveSpec::y_homodyne(eta), rng, times);
        break;
      case Scheme::y_secular:
        r = run_homodyne_trajectory(sc, DiffusiveSpec::secular_y(eta), rng, times,
                                    BlochState::plus(), sign_of(cfg));
        break;
    }
    runs.push_back(std::move(r.samples));
  }
  return runs;
}

void positivity_and_average_checks(std::vector<CheckResult>& out, const RunConfig& cfg) {
  const std::vector<double> times{1.0, 5.0};
  std::uint64_t offset = 1000;
  for (Scheme s : all_schemes()) {
    const std::string name = to_string(s);
    offset += 10000;
    std::vector<std::vector<BlochState>> runs;
    try {
      runs = scheme_runs(s, 0.8, cfg, times, 400, offset);
    } catch (const std::exception& e) {
      out.push_back({"trace_positivity_" + name, false, 1.0, 0.0, e.what()});
      out.push_back({"me_average_" + name, false, 1.0, 0.0, "trajectories failed"});
      continue;
    }
    double worst = 0.0;
    for (const auto& r : runs)
      for (const auto& b : r)
        worst = std::max({worst, std::abs(b.w - 1.0), std::sqrt(b.vector_norm_sq()) - 1.0});
    out.push_back(bounded("trace_positivity_" + name, worst, kPositivityTolerance));

    SimConfig sc;
    sc.omega = cfg.omega;
    sc.dt = 1e-3;
    const bool secular = s == Scheme::said || s == Scheme::y_secular;
    const BlochState init = secular ? BlochState::plus() : BlochState::ground();
    const auto me = propagate_me_at(init, sc, secular ? Frame::secular : Frame::lab, times);
    double worst_z = 0.0;
    for (std::size_t t = 0; t < times.size(); ++t) {
      std::array<MeanAccumulator, 3> acc;
      for (const auto& r : runs) {
        acc[0].add(r[t].x);
        acc[1].add(r[t].y);
        acc[2].add(r[t].z);
      }
      const std::array<double, 3> ref{me[t].x, me[t].y, me[t].z};
      for (int a = 0; a < 3; ++a) {
        const double se = std::max(acc[a].standard_error(), 1e-12);
        worst_z = std::max(worst_z, std::abs(acc[a].mean() - ref[a]) / se);
      }
    }
    out.push_back(bounded("me_average_" + name, worst_z, 4.0, "max |mean − ME| in standard errors"));
  }
}

void dt_checks(std::vector<CheckResult>& out, const RunConfig& cfg) {
  const double lab_dt = scheme_dt(Scheme::x_lab, cfg.omega, cfg.dt);
  const double lab_limit = 1e-2 / std::max(1.0, cfg.omega);
  out.push_back(bounded("lab_dt_resolution", lab_dt, lab_limit, "dt must resolve the Rabi period"));

  // Same Brownian path at dt and dt/2; first-order strong error should stay small.
  const double dt = scheme_dt(Scheme::y_secular, cfg.omega, cfg.dt);
  const double eta = 0.8;
  double total = 0.0;
  std::string detail;
  try {
    const SecularYStepper coarse(eta, 1.0, dt, sign_of(cfg));
    const SecularYStepper fine(eta, 1.0, 0.5 * dt, sign_of(cfg));
    const auto spec = DiffusiveSpec::secular_y(eta);
    const int n = 20;
    for (int k = 0; k < n; ++k) {
      RandomStream rng = substream(cfg.seed, stream_tag::validate, 300 + k);
      Mat2 rc = to_matrix(BlochState::plus()), rf = rc;
      const int steps = static_cast<int>(std::lround(2.0 / dt));
      for (int i = 0; i < steps; ++i) {
        const auto n1 = sample_noise(spec, 0.5 * dt, rng);
        const auto n2 = sample_noise(spec, 0.5 * dt, rng);
        NoiseIncrement sum;
        sum.dV_omega = n1.dV_omega + n2.dV_omega;
        sum.dW_x = n1.dW_x + n2.dW_x;
        rc = coarse.step(rc, sum);
        rf = fine.step(fine.step(rf, n1), n2);
      }
      const BlochState a = from_matrix(rc), b = from_matrix(rf);
      total += std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                         (a.z - b.z) * (a.z - b.z));
    }
    total /= n;
  } catch (const std::exception& e) {
    total = 1.0;
    detail = e.what();
  }
  out.push_back(bounded("secular_dt_refinement", total, 2e-2, detail));
}

void oracle_checks(std::vector<CheckResult>& out, const RunConfig& cfg) {
  double worst_routes = 0.0, worst_order = 0.0;
  for (double eta : {0.2, 0.4, 0.6, 0.8, 0.9}) {
    worst_routes = std::max(worst_routes,
                            std::abs(expected_beta(eta, 1e-11).value - expected_beta_direct(eta, 1e-11)));
  }
  for (double eta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    worst_order = std::max(worst_order, expected_beta(eta).value - said_ex2_analytic(eta));
  }
  out.push_back(bounded("beta_mean_two_routes", worst_routes, 1e-8));
  out.push_back(bounded("ordering_beta_below_said", worst_order, 1e-12));
  out.push_back(bounded("said_unity_at_full_efficiency", std::abs(said_ex2_analytic(1.0) - 1.0), 1e-6));

  EnsembleOptions eo;
  eo.n_records = 20000;
  eo.records_per_trajectory = 500;
  eo.seed = cfg.seed;
  eo.workers = cfg.workers;
  const auto mc = stationary_purity(Scheme::said, 0.6, cfg.omega, eo);
  out.push_back(bounded("said_mc_vs_oracle",
                        std::abs(mc.mean - said_ex2_analytic(0.6)) / mc.standard_error, 4.0,
                        "in standard errors, eta = 0.6"));
}

void noise_checks(std::vector<CheckResult>& out, std::uint64_t seed) {
  const std::vector<DiffusiveSpec> specs{
      DiffusiveSpec::qsd(), DiffusiveSpec::x_homodyne(0.7), DiffusiveSpec::y_homodyne(0.5),
      DiffusiveSpec::general(0.9, {0.3, 0.4}), DiffusiveSpec::general(0.6, {0.0, -0.6})};
  const double dt = 1e-3;
  double worst = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    RandomStream rng = substream(seed, stream_tag::validate, 400 + k);
    MeanAccumulator m2, re, im;
    for (int i = 0; i < 200000; ++i) {
      const auto z = sample_noise(specs[k], dt, rng).dZ;
      m2.add(std::norm(z) / dt);
      re.add((z * z).real() / dt);
      im.add((z * z).imag() / dt);
    }
    worst = std::max({worst, std::abs(m2.mean() - specs[k].eta) / m2.standard_error(),
                      std::abs(re.mean() - specs[k].upsilon.real()) / std::max(re.standard_error(), 1e-9),
                      std::abs(im.mean() - specs[k].upsilon.imag()) / std::max(im.standard_error(), 1e-9)});
  }
  out.push_back(bounded("noise_moments", worst, 5.0, "max deviation in standard errors over 5 specs"));
}

// One-step moments of β from the stepper, integrated exactly over the Gaussian
// innovations with a 5-point Gauss–Hermite rule per dimension.
void beta_drift_check(std::vector<CheckResult>& out, const RunConfig& cfg) {
  static constexpr std::array<double, 5> x{-2.856970013872806, -1.355626179974266, 0.0,
                                           1.355626179974266, 2.856970013872806};
  static constexpr std::array<double, 5> w{0.011257411327721, 0.222075922005613,
                                           0.533333333333333, 0.222075922005613,
                                           0.011257411327721};
  const double eta = 0.6, dt = 1e-5;
  const SecularYStepper stepper(eta, 1.0, dt, sign_of(cfg));
  double worst = 0.0;
  for (double beta : {0.2, 0.5, 0.8}) {
    for (double theta : {0.3, 2.0, 4.5}) {
      const double r = std::sqrt(beta);
      const Mat2 rho = to_matrix({1.0, 0.0, r * std::cos(theta), r * std::sin(theta)});
      double m1 = 0.0, m2 = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          for (int k = 0; k < 5; ++k) {
            NoiseIncrement n;
            n.dV_omega = {x[i] * std::sqrt(0.5 * dt), x[j] * std::sqrt(0.5 * dt)};
            n.dW_x = x[k] * std::sqrt(dt);
            const BlochState s = from_matrix(stepper.step(rho, n));
            const double d = s.y * s.y + s.z * s.z - beta;
            const double wt = w[i] * w[j] * w[k];
            m1 += wt * d;
            m2 += wt * d * d;
          }
      const auto ref = beta_drift_diffusion(beta, eta);
      worst = std::max({worst, std::abs(m1 / dt - ref.drift), std::abs(m2 / dt - ref.diffusion)});
    }
  }
  out.push_back(bounded("beta_drift_diffusion_cross_check", worst, 1e-2));
}

void estimator_check(std::vector<CheckResult>& out, std::uint64_t seed) {
  ConditionedEnsemble e;
  e.scheme = Scheme::said;
  RandomStream rng = substream(seed, stream_tag::validate, 500);
  e.records.resize(20000);
  static constexpr std::array<Axis, 3> kAll{Axis::x, Axis::y, Axis::z};
  for (std::size_t i = 0; i < e.records.size(); ++i) {
    auto& r = e.records[i];
    r.label = {2.0 * rng.uniform() - 1.0, 0.0};
    r.state = BlochState::maximally_mixed();
    r.trajectory = static_cast<std::uint32_t>(i / 500);
    const auto o = simulate_bob_outcomes(r.state, kAll, 4, rng);
    for (int a = 0; a < 3; ++a) r.bob[a] = tally(o.outcomes[a]);
  }
  const BinSpec bins{50};
  const double est = bin_estimate(e, Functional::f1, bins).value;
  BootstrapOptions bo;
  bo.seed = seed;
  const double err = bootstrap_error(e, Functional::f1, bins, bo);
  out.push_back(bounded("bias_corrected_zero_mean_bins", std::abs(est) / err, 4.0,
                        "|estimate| in bootstrap errors"));
}

void null_checks(std::vector<CheckResult>& out, const RunConfig& cfg) {
  EnsembleOptions eo;
  eo.n_records = 5000;
  eo.records_per_trajectory = 500;
  eo.seed = cfg.seed;
  eo.workers = cfg.workers;
  eo.dt = cfg.dt;
  for (Pair p : {Pair::said_y, Pair::x_y}) {
    try {
      const auto r = null_model_steering(p, 0.5, 0.5, cfg.omega, eo);
      out.push_back(bounded("null_model_bound_" + to_string(p), r.s_value - 1.0 - 3.0 * r.mc_error,
                            0.0, "S = " + format_number(r.s_value) + " +- " + format_number(r.mc_error)));
    } catch (const std::exception& e) {
      out.push_back({"null_model_bound_" + to_string(p), false, 1.0, 0.0, e.what()});
    }
  }
}

void determinism_check(std::vector<CheckResult>& out, const RunConfig& cfg) {
  RunConfig c = cfg;
  c.scheme = "said";
  c.eta_grid = {0.5, 0.9};
  c.n_traj = 4;
  c.t_final = c.burn_in + 99.0;
  c.out = "determinism.csv";
  c.workers = 1;
  const auto first = cmd_curve(c);
  c.workers = 4;
  const auto second = cmd_curve(c);
  const bool same = first.files.size() == second.files.size() &&
                    first.files.front().content == second.files.front().content;
  out.push_back({"determinism_byte_identity", same, same ? 0.0 : 1.0, 0.0,
                 "curve output with 1 and 4 workers"});
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& config) {
  std::vector<CheckResult> out;
  functional_checks(out, config.seed);
  said_closure_check(out, config.seed);
  confinement_check(out, config);
  positivity_and_average_checks(out, config);
  dt_checks(out, config);
  oracle_checks(out, config);
  noise_checks(out, config.seed);
  beta_drift_check(out, config);
  if (config.phase_check) {
    const bool standard = sign_of(config) == SidebandSign::standard;
    out.push_back({"sideband_phase_convention", standard, standard ? 0.0 : 1.0, 0.0,
                   "secular Y sideband sign must follow the rotating-frame transform"});
  }
  estimator_check(out, config.seed);
  null_checks(out, config);
  determinism_check(out, config);
  return out;
}

}  // namespace qjumps
