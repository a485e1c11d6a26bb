#include "qjumps/beta_oracle.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <string>

#include "qjumps/errors.hpp"
#include "qjumps/quadrature.hpp"

namespace qjumps {

BetaCoefficients beta_drift_diffusion(double beta, double eta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  const double one_minus = 1.0 - beta;
  return {-1.5 * beta + eta * (1.0 + 0.5 * beta * beta), 2.0 * eta * beta * one_minus * one_minus};
}

DensityRegime density_regime(double eta) {
  if (eta <= 0.0) return DensityRegime::point_mass_at_zero;
  if (eta >= 1.0) return DensityRegime::point_mass_at_one;
  return DensityRegime::normalizable;
}

BetaDensity::BetaDensity(double eta, double tol) : eta_(eta) {
  switch (density_regime(eta)) {
    case DensityRegime::point_mass_at_zero:
      throw DomainError("stationary beta density is a point mass at 0 for eta <= 0");
    case DensityRegime::point_mass_at_one:
      throw DomainError("stationary beta density is not normalizable for eta >= 1");
    case DensityRegime::normalizable:
      break;
  }
  c_ = 1.5 * (1.0 - eta) / eta;
  const double c = c_;
  auto kernel = [c](double u) { return std::sqrt(1.0 + u) * std::exp(-c * u); };
  const QuadResult z = integrate_decaying(kernel, 0.5 * c, 0.0, tol);
  norm_ = 1.0 / z.value;
}

double BetaDensity::pdf(double beta) const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (beta >= 1.0) return 0.0;
  const double one_minus = 1.0 - beta;
  return norm_ * std::pow(one_minus, -2.5) * std::exp(-c_ * beta / one_minus);
}

double BetaDensity::cdf(double beta) const {
  if (beta <= 0.0) return 0.0;
  if (beta >= 1.0) return 1.0;
  // ∫_0^U (1+u)^{1/2} e^{−cu} du = e^c c^{−3/2} Γ(3/2) [Q(3/2, c) − Q(3/2, c(1+U))]
  const double u = beta / (1.0 - beta);
  const double q0 = boost::math::gamma_q(1.5, c_);
  const double q1 = boost::math::gamma_q(1.5, c_ * (1.0 + u));
  return (q0 - q1) / q0;
}

double BetaDensity::mean(double tol) const {
  const double c = c_;
  auto kernel = [c](double u) { return u / std::sqrt(1.0 + u) * std::exp(-c * u); };
  return norm_ * integrate_decaying(kernel, 0.5 * c, tol).value;
}

double stationary_pdf(double beta, double eta) { return BetaDensity(eta).pdf(beta); }

BetaExpectation expected_beta(double eta, double tol) {
  const DensityRegime regime = density_regime(eta);
  if (regime == DensityRegime::point_mass_at_zero) return {0.0, regime};
  if (regime == DensityRegime::point_mass_at_one) return {1.0, regime};
  const BetaDensity density(eta, 1e-3 * tol);
  return {std::clamp(density.mean(0.5 * tol), 0.0, 1.0), regime};
}

double expected_beta_direct(double eta, double tol) {
  if (density_regime(eta) != DensityRegime::normalizable) {
    throw DomainError("expected_beta_direct needs 0 < eta < 1");
  }
  const double c = 1.5 * (1.0 - eta) / eta;
  // Unnormalized density, with the exponent written to stay finite as β → 1.
  auto p = [c](double beta) {
    const double one_minus = 1.0 - beta;
    if (one_minus <= 0.0) return 0.0;
    return std::exp(-c * beta / one_minus - 2.5 * std::log(one_minus));
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double z = integrator.integrate(p, 0.0, 1.0, tol);
  const double m = integrator.integrate([&](double b) { return b * p(b); }, 0.0, 1.0, tol);
  return m / z;
}

}  // namespace qjumps
