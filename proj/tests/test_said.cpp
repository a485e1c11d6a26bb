#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/random.hpp"
#include "qjumps/said.hpp"
#include "qjumps/stats.hpp"

using namespace qjumps;

namespace {

// No-jump generator built from matrices: secular dissipators minus the detected
// jump terms η(c1ρc1† + c2'ρc2'† + c3ρc3†), c2' = (σx + lo)/2.
oracle::M nojump_matrix(const oracle::M& r, double eta, int lo) {
  using namespace oracle;
  const M c1 = scale(0.5, ket_bra(-1, +1)), c2 = scale(0.5, sx()), c3 = scale(0.5, ket_bra(+1, -1));
  const M c2p = scale(0.5, add(sx(), identity(), double(lo)));
  M gen = add(add(dissipator(c1, r), dissipator(c2, r)), dissipator(c3, r));
  gen = add(gen, add(add(sandwich(c1, r), sandwich(c2p, r)), sandwich(c3, r)), -eta);
  return gen;
}

// RK4 on the matrix generator; returns populations (w+, w−).
std::pair<double, double> oracle_populations(double wp, double wm, double eta, int lo, double tau) {
  using namespace oracle;
  M r = rho_of(wp + wm, wp - wm, 0, 0);
  const int n = std::max(200, static_cast<int>(tau / 2e-3));
  const double h = tau / n;
  for (int i = 0; i < n; ++i) {
    const M k1 = nojump_matrix(r, eta, lo);
    const M k2 = nojump_matrix(add(r, k1, 0.5 * h), eta, lo);
    const M k3 = nojump_matrix(add(r, k2, 0.5 * h), eta, lo);
    const M k4 = nojump_matrix(add(r, k3, h), eta, lo);
    r = add(r, add(add(add(k1, k2, 2.0), k3, 2.0), k4), h / 6.0);
  }
  const auto b = bloch_of(r);
  return {0.5 * (b[0] + b[1]), 0.5 * (b[0] - b[1])};
}

}  // namespace

TEST_SUITE("said") {
  TEST_CASE("no-jump derivative examples") {
    const auto d0 = nojump_derivative({0.7, 0.3, +1, 0.0}, 0.0);
    CHECK(d0.dw_plus + d0.dw_minus == doctest::Approx(0.0));
    const auto d1 = nojump_derivative({1.0, 0.0, +1, 0.0}, 0.8);
    CHECK(-(d1.dw_plus + d1.dw_minus) == doctest::Approx(1.25 * 0.8));
  }

  TEST_CASE("no-jump derivative equals the matrix generator") {
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 500; ++i) {
      const double eta = u(g), wp = u(g), wm = u(g);
      const int lo = u(g) < 0.5 ? 1 : -1;
      const auto d = nojump_derivative({wp, wm, lo, 0.0}, eta);
      const auto m = oracle::bloch_of(nojump_matrix(oracle::rho_of(wp + wm, wp - wm, 0, 0), eta, lo));
      CHECK(d.dw_plus == doctest::Approx(0.5 * (m[0] + m[1])).epsilon(1e-13));
      CHECK(d.dw_minus == doctest::Approx(0.5 * (m[0] - m[1])).epsilon(1e-13));
      CHECK(std::abs(m[2]) < 1e-15);  // x-diagonal stays x-diagonal
      CHECK(std::abs(m[3]) < 1e-15);
    }
  }

  TEST_CASE("closed-form propagator matches numerical integration") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 100; ++i) {
      const double eta = u(g), tau = 8.0 * u(g);
      const NoJumpPropagator prop(eta);
      const auto [a, b] = oracle_populations(1.0, 0.0, eta, +1, tau);
      CHECK(std::abs(prop.survival(1.0, 0.0, tau) - (a + b)) <= 1e-10);
      const auto p = prop.evolve(1.0, 0.0, tau);
      CHECK(std::abs(p.matched - a) <= 1e-10);
      CHECK(std::abs(p.other - b) <= 1e-10);
    }
  }

  TEST_CASE("mean waiting time matches quadrature of the survival function") {
    const double eta = 0.6;
    const NoJumpPropagator prop(eta);
    // ∫ τ p(τ) dτ = ∫ S(τ) dτ; the oracle integrates RK4 populations on a grid.
    const double horizon = 200.0;
    const int n = 10000;
    std::vector<double> s(n + 1);
    {
      using namespace oracle;
      M r = rho_of(1, 1, 0, 0);
      const double h = horizon / n;
      s[0] = 1.0;
      const int sub = 10;
      for (int i = 1; i <= n; ++i) {
        for (int k = 0; k < sub; ++k) {
          const double hh = h / sub;
          const M k1 = nojump_matrix(r, eta, 1);
          const M k2 = nojump_matrix(add(r, k1, 0.5 * hh), eta, 1);
          const M k3 = nojump_matrix(add(r, k2, 0.5 * hh), eta, 1);
          const M k4 = nojump_matrix(add(r, k3, hh), eta, 1);
          r = add(r, add(add(add(k1, k2, 2.0), k3, 2.0), k4), hh / 6.0);
        }
        s[i] = bloch_of(r)[0];
      }
    }
    double quad = s[0] + s[n];
    for (int i = 1; i < n; ++i) quad += s[i] * (i % 2 ? 4.0 : 2.0);
    quad *= (horizon / n) / 3.0;
    CHECK(prop.mean_waiting_time(1.0, 0.0) == doctest::Approx(quad).epsilon(1e-9));

    RandomStream rng(123);
    MeanAccumulator acc;
    for (int i = 0; i < 1000000; ++i) acc.add(sample_waiting_time({1.0, 0.0, +1, 0.0}, eta, rng).tau);
    CHECK(std::abs(acc.mean() - quad) <= 4.0 * acc.standard_error());
  }

  TEST_CASE("channel frequencies match rate-weighted survival integrals") {
    const double eta = 1.0;
    // P(channel) = ∫ rate_channel(τ) dτ with rates (η/4)a, ηa, (η/4)b.
    const int n = 4000;
    const double horizon = 60.0;
    const NoJumpPropagator prop(eta);
    auto integral = [&](auto f) { return oracle::simpson(f, 0.0, horizon, n); };
    const auto [a1, b1] = oracle_populations(1.0, 0.0, eta, +1, 1.0);
    CHECK(std::abs(prop.evolve(1, 0, 1.0).matched - a1) < 1e-10);
    CHECK(std::abs(prop.evolve(1, 0, 1.0).other - b1) < 1e-10);
    const double p_flip = integral([&](double t) { return 0.25 * eta * prop.evolve(1, 0, t).matched; });
    const double p_central = integral([&](double t) { return eta * prop.evolve(1, 0, t).matched; });
    const double p_same = integral([&](double t) { return 0.25 * eta * prop.evolve(1, 0, t).other; });
    CHECK(p_flip + p_central + p_same == doctest::Approx(1.0).epsilon(1e-8));

    RandomStream rng(77);
    const int draws = 1000000;
    std::array<int, 3> counts{};
    for (int i = 0; i < draws; ++i) {
      ++counts[static_cast<int>(sample_waiting_time({1.0, 0.0, +1, 0.0}, eta, rng).channel)];
    }
    const std::array<double, 3> expect{p_flip, p_central, p_same};
    // side_minus flips |+⟩ → |−⟩, side_plus keeps |+⟩.
    for (int k = 0; k < 3; ++k) {
      const double f = double(counts[k]) / draws;
      const double se = std::sqrt(expect[k] * (1 - expect[k]) / draws);
      CHECK(std::abs(f - expect[k]) <= 4.0 * se);
    }
  }

  TEST_CASE("eta = 0 never jumps") {
    RandomStream rng(1);
    CHECK(sample_waiting_time({1.0, 0.0, +1, 0.0}, 0.0, rng).never);
  }

  TEST_CASE("post-state and feedback rule") {
    CHECK(said_post_state(SaidChannel::side_minus, +1) == -1);
    CHECK(said_post_state(SaidChannel::central, +1) == +1);
    CHECK(said_post_state(SaidChannel::side_plus, +1) == +1);
    CHECK(said_post_state(SaidChannel::side_plus, -1) == +1);
    CHECK(said_post_state(SaidChannel::central, -1) == -1);
    CHECK(said_post_state(SaidChannel::side_minus, -1) == -1);
    SimConfig cfg;
    RandomStream rng(3);
    const auto times = stationary_schedule(20.0, 0.5, 200);
    const auto rec = run_said_trajectory(cfg, 0.7, rng, times, SaidState{}, true);
    int lo = +1;
    for (const auto& j : rec.jumps) {
      CHECK(j.post_state == said_post_state(j.channel, lo));
      lo = j.post_state;
    }
    CHECK(rec.jump_count == rec.jumps.size());
  }

  TEST_CASE("trajectories at the efficiency extremes") {
    SimConfig cfg;
    const auto times = stationary_schedule(20.0, 1.0, 500);
    RandomStream rng(8);
    const auto pure = run_said_trajectory(cfg, 1.0, rng, times);
    for (const auto& s : pure.samples) CHECK(std::abs(std::abs(s.x) - 1.0) < 1e-12);
    const auto none = run_said_trajectory(cfg, 0.0, rng, times);
    for (const auto& s : none.samples) CHECK(s.x * s.x < 1e-8);
  }

  TEST_CASE("ensemble average follows the secular master equation") {
    SimConfig cfg;
    const std::vector<double> times{0.5, 2.0, 5.0};
    std::array<MeanAccumulator, 3> acc;
    for (int j = 0; j < 10000; ++j) {
      RandomStream rng = substream(99, stream_tag::said, j);
      const auto r = run_said_trajectory(cfg, 0.6, rng, times);
      for (int k = 0; k < 3; ++k) acc[k].add(r.samples[k].x);
    }
    const auto me = propagate_me_at(BlochState::plus(), cfg, Frame::secular, times);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(acc[k].mean() - me[k].x) <= 4.0 * acc[k].standard_error());
    }
  }

  TEST_CASE("mirror symmetry of the x² statistics") {
    SimConfig cfg;
    const auto times = stationary_schedule(20.0, 1.0, 300);
    RandomStream a(5), b(5);
    const auto plus = run_said_trajectory(cfg, 0.5, a, times, SaidState{1.0, 0.0, +1, 0.0});
    const auto minus = run_said_trajectory(cfg, 0.5, b, times, SaidState{0.0, 1.0, -1, 0.0});
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(plus.samples[k].x == doctest::Approx(-minus.samples[k].x).epsilon(1e-12));
    }
  }

  TEST_CASE("no-jump <sigma_x> relaxes monotonically from a pure start") {
    for (double eta : {0.1, 0.4, 0.7, 1.0}) {
      const NoJumpPropagator prop(eta);
      // The conditional state slides towards the slow eigenvector without overshoot.
      double last = 1.0;
      for (int i = 1; i <= 400; ++i) {
        const auto p = prop.evolve(1.0, 0.0, 0.05 * i);
        const double x = (p.matched - p.other) / (p.matched + p.other);
        CHECK(x <= last + 1e-14);
        CHECK(x >= -1.0);
        last = x;
      }
    }
  }

  TEST_CASE("analytic E[x^2] limits, domain and monotonicity") {
    CHECK(said_ex2_analytic(1.0, 1e-10) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(said_ex2_analytic(1e-4, 1e-12) < 1e-3);
    CHECK_THROWS_AS(said_ex2_analytic(0.0), DomainError);
    CHECK_THROWS_AS(said_ex2_analytic(-0.1), DomainError);
    CHECK_THROWS_AS(said_ex2_analytic(1.1), DomainError);
    double last = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const double v = said_ex2_analytic(0.1 * k);
      CHECK(v > last);
      last = v;
    }
    // Tolerance halving moves the value by less than the tolerance.
    CHECK(std::abs(said_ex2_analytic(0.5, 1e-8) - said_ex2_analytic(0.5, 5e-9)) < 1e-8);
  }

  TEST_CASE("analytic E[x^2] at eta = 0.5 against a 10^7-cycle simulation") {
    SimConfig cfg;
    const double eta = 0.5;
    const std::size_t n_traj = 1000;
    // ≈ 1.6 time units per cycle at this efficiency → 1.6·10^4 per trajectory.
    const NoJumpPropagator prop(eta);
    const double horizon = 1e4 * prop.mean_waiting_time(1.0, 0.0);
    const auto times = stationary_schedule(20.0, 1.0, static_cast<std::size_t>(horizon));
    std::vector<std::vector<double>> series(n_traj);
    std::size_t cycles = 0;
    for (std::size_t j = 0; j < n_traj; ++j) {
      RandomStream rng = substream(2024, stream_tag::said, j);
      const auto r = run_said_trajectory(cfg, eta, rng, times);
      cycles += r.jump_count;
      series[j].reserve(r.samples.size());
      for (const auto& s : r.samples) series[j].push_back(s.x * s.x);
    }
    const auto mc = blocked_mean(series, 10);
    MESSAGE("cycles = " << cycles << ", MC = " << mc.mean << " +- " << mc.standard_error);
    CHECK(cycles >= 9'500'000);
    CHECK(std::abs(mc.mean - said_ex2_analytic(eta)) <= 3.0 * mc.standard_error);
  }

  TEST_CASE("jump-sampled and time-averaged purities are distinct quantities") {
    // x² sampled just before a jump over-weights the high-purity part of each cycle.
    for (double eta : {0.2, 0.5, 0.8}) {
      CHECK(said_ex2_jump_sampled(eta) > said_ex2_analytic(eta));
    }
    CHECK(said_ex2_jump_sampled(1.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
}
