#pragma once

#include <span>
#include <vector>

#include "qjumps/bloch_state.hpp"

namespace qjumps {

/// One monitored diffusive channel: the record increment is
/// dY = efficiency·⟨op + op†⟩dt + u with innovation u of variance efficiency·dt.
struct MeasuredChannel {
  Mat2 op;
  double efficiency;
};

/// First-order completely positive step for a diffusive unravelling,
///   ρ̃' = U [ M ρ M† + dt Σ_m r_m ρ r_m† ] U†,  M = 1 + drift·dt + Σ_k op_k dY_k,
/// followed by normalization. `drift` carries −iH − ½Σ c†c for the part of the
/// Hamiltonian not in U; `unread` carries the unmonitored share of the jump terms.
struct DiffusiveModel {
  Mat2 drift{};
  std::vector<MeasuredChannel> channels;
  std::vector<Mat2> unread;
  bool has_unitary = false;
  Mat2 unitary = Mat2::identity();
};

/// ⟨op + op†⟩ for a normalized ρ.
inline double quadrature_mean(const Mat2& op, const Mat2& rho) {
  return 2.0 * (op * rho).trace().real();
}

/// Record increments for given innovations (the actual measurement statistics).
void records_from_innovations(const DiffusiveModel& model, const Mat2& rho,
                              std::span<const double> innovations, double dt,
                              std::span<double> records);

/// Unnormalized update driven by explicit records; used directly by filters that
/// see a record generated by a different state.
Mat2 kraus_update(const DiffusiveModel& model, const Mat2& rho, std::span<const double> records,
                  double dt);

/// Normalized step from innovations; Hermiticity is restored and positivity is
/// enforced under the core-state policy.
Mat2 kraus_step(const DiffusiveModel& model, const Mat2& rho, std::span<const double> innovations,
                double dt);

/// Trace normalization plus Hermitian symmetrization and the positivity policy.
Mat2 renormalize(const Mat2& rho_unnormalized);

}  // namespace qjumps
