#pragma once

namespace qjumps {

/// Coefficients of dβ = γA(β)dt + sqrt(γB(β)) dW_β for β = y² + z² under secular
/// Y-homodyne monitoring: A = −3β/2 + η(1 + β²/2), B = 2ηβ(1 − β)².
struct BetaCoefficients {
  double drift;
  double diffusion;
};

BetaCoefficients beta_drift_diffusion(double beta, double eta);

enum class DensityRegime {
  normalizable,        // 0 < η < 1
  point_mass_at_zero,  // η ≤ 0
  point_mass_at_one,   // η ≥ 1
};

DensityRegime density_regime(double eta);

/// Normalized stationary density p(β) ∝ (1−β)^{−5/2} exp[−cβ/(1−β)], c = 3(1−η)/(2η).
/// The normalization is computed once through u = β/(1−β), where the integrand
/// becomes (1+u)^{1/2} e^{−cu}. Immutable after construction.
class BetaDensity {
 public:
  /// Throws DomainError when the regime is not normalizable.
  explicit BetaDensity(double eta, double tol = 1e-12);

  double eta() const { return eta_; }
  double decay() const { return c_; }
  /// N' such that p(β) = N' (1−β)^{−5/2} exp[−cβ/(1−β)].
  double normalization() const { return norm_; }

  double pdf(double beta) const;
  /// P(β' ≤ β), through the regularized upper incomplete gamma function.
  double cdf(double beta) const;
  /// E[β] by adaptive quadrature in u.
  double mean(double tol) const;

 private:
  double eta_;
  double c_;
  double norm_;
};

double stationary_pdf(double beta, double eta);

struct BetaExpectation {
  double value;
  DensityRegime regime;
};

/// E[β] to absolute accuracy tol; η ≤ 0 and η ≥ 1 return 0 and 1 by convention.
BetaExpectation expected_beta(double eta, double tol = 1e-10);

/// Same quantity by direct quadrature on β ∈ [0, 1) (tanh-sinh endpoint handling);
/// kept as an independent cross-check of the u-substitution route.
double expected_beta_direct(double eta, double tol = 1e-10);

}  // namespace qjumps
