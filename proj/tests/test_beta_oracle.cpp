#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qjumps/beta_oracle.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/said.hpp"

using namespace qjumps;

namespace {

// The β-SDE coefficients evaluated independently of the library.
double drift(double b, double e) { return -1.5 * b + e * (1.0 + 0.5 * b * b); }
double diffusion(double b, double e) { return 2.0 * e * b * (1.0 - b) * (1.0 - b); }

// Generic stationary solution of the Fokker–Planck equation for dβ = A dt + √B dW:
// p ∝ exp(∫ 2A/B) / B, anchored at β = 1/2.
double generic_density(double beta, double eta) {
  const double integral = oracle::simpson([&](double b) { return 2.0 * drift(b, eta) / diffusion(b, eta); },
                                          0.5, beta, 4000);
  return std::exp(integral) / diffusion(beta, eta);
}

}  // namespace

TEST_SUITE("beta_oracle") {
  TEST_CASE("drift and diffusion examples") {
    auto c = beta_drift_diffusion(0.0, 0.7);
    CHECK(c.drift == doctest::Approx(0.7));
    CHECK(c.diffusion == 0.0);
    c = beta_drift_diffusion(1.0, 0.7);
    CHECK(c.drift == doctest::Approx(1.5 * (0.7 - 1.0)));
    CHECK(c.diffusion == 0.0);
    c = beta_drift_diffusion(0.5, 1.0);
    CHECK(c.drift == doctest::Approx(0.375));
    CHECK(c.diffusion == doctest::Approx(0.25));
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 100; ++i) {
      const double b = u(g), e = u(g);
      c = beta_drift_diffusion(b, e);
      CHECK(c.drift == doctest::Approx(drift(b, e)).epsilon(1e-14));
      CHECK(c.diffusion == doctest::Approx(diffusion(b, e)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(beta_drift_diffusion(-0.1, 0.5), DomainError);
    CHECK_THROWS_AS(beta_drift_diffusion(1.1, 0.5), DomainError);
    CHECK_THROWS_AS(beta_drift_diffusion(0.5, 1.5), DomainError);
  }

  TEST_CASE("density is normalized") {
    for (double eta : {0.3, 0.6, 0.9}) {
      const double total = oracle::simpson([&](double b) { return stationary_pdf(b, eta); }, 0.0,
                                           1.0 - 1e-12, 40000);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  TEST_CASE("density matches the generic stationary solution") {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> ub(0.02, 0.95), ue(0.1, 0.95);
    for (int i = 0; i < 20; ++i) {
      const double beta = ub(g), eta = ue(g);
      const double lib = stationary_pdf(beta, eta) / stationary_pdf(0.5, eta);
      const double ref = generic_density(beta, eta) / generic_density(0.5, eta);
      CHECK(lib == doctest::Approx(ref).epsilon(1e-6));
    }
  }

  TEST_CASE("cdf is the integral of the density") {
    const BetaDensity d(0.7);
    for (double b : {0.1, 0.4, 0.7, 0.9, 0.99}) {
      const double ref = oracle::simpson([&](double x) { return d.pdf(x); }, 0.0, b, 20000);
      CHECK(d.cdf(b) == doctest::Approx(ref).epsilon(1e-9));
    }
    CHECK(d.cdf(0.0) == 0.0);
    CHECK(d.cdf(1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("regimes at the endpoints") {
    CHECK(density_regime(0.0) == DensityRegime::point_mass_at_zero);
    CHECK(density_regime(1.0) == DensityRegime::point_mass_at_one);
    CHECK(density_regime(0.5) == DensityRegime::normalizable);
    CHECK_THROWS_AS(BetaDensity(1.0), DomainError);
    CHECK_THROWS_AS(BetaDensity(0.0), DomainError);
    CHECK_THROWS_AS(stationary_pdf(0.5, 1.0), DomainError);
    const auto one = expected_beta(1.0);
    CHECK(one.value == 1.0);
    CHECK(one.regime == DensityRegime::point_mass_at_one);
    const auto zero = expected_beta(0.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.regime == DensityRegime::point_mass_at_zero);
  }

  TEST_CASE("expected beta limits and two quadrature routes") {
    CHECK(expected_beta(1e-3).value < 1e-2);
    CHECK(expected_beta(0.999).value > 0.99);
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      CHECK(std::abs(expected_beta(eta, 1e-12).value - expected_beta_direct(eta, 1e-12)) <= 1e-8);
    }
    const double ref = oracle::simpson([](double b) { return b * stationary_pdf(b, 0.5); }, 0.0,
                                       1.0 - 1e-12, 40000);
    CHECK(expected_beta(0.5).value == doctest::Approx(ref).epsilon(1e-8));
  }

  TEST_CASE("expected beta is increasing and below the SAID purity") {
    double last = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double eta = 0.049 * k;
      const double v = expected_beta(eta).value;
      CHECK(v > last);
      last = v;
      // Near η = 1 the two curves cross (both tend to 1); the ordering holds below.
      if (eta <= 0.95) CHECK(v <= said_ex2_analytic(eta));
    }
    for (double eta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      CHECK(expected_beta(eta).value <= said_ex2_analytic(eta) + 1e-12);
    }
  }

  TEST_CASE("tolerance halving moves results by less than the tolerance") {
    for (double eta : {0.3, 0.8}) {
      const double tol = 1e-8;
      CHECK(std::abs(expected_beta(eta, tol).value - expected_beta(eta, tol / 2).value) < tol);
    }
  }
}
