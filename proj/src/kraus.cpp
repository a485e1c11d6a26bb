#include "qjumps/kraus.hpp"

#include <array>

#include "qjumps/errors.hpp"

namespace qjumps {

void records_from_innovations(const DiffusiveModel& model, const Mat2& rho,
                              std::span<const double> innovations, double dt,
                              std::span<double> records) {
  for (std::size_t k = 0; k < model.channels.size(); ++k) {
    const auto& ch = model.channels[k];
    records[k] = innovations[k] + ch.efficiency * quadrature_mean(ch.op, rho) * dt;
  }
}

Mat2 kraus_update(const DiffusiveModel& model, const Mat2& rho, std::span<const double> records,
                  double dt) {
  Mat2 m = Mat2::identity() + dt * model.drift;
  for (std::size_t k = 0; k < model.channels.size(); ++k) {
    m = m + records[k] * model.channels[k].op;
  }
  Mat2 out = sandwich(m, rho);
  for (const Mat2& r : model.unread) out = out + dt * sandwich(r, rho);
  if (model.has_unitary) out = sandwich(model.unitary, out);
  return out;
}

Mat2 renormalize(const Mat2& rho) {
  BlochState s = from_matrix(rho);
  const double w = s.w;
  if (!(w > 0.0)) throw PositivityError("diffusive step produced a non-positive trace");
  s = normalize(s).state;
  enforce_positivity(s);
  return to_matrix(s);
}

Mat2 kraus_step(const DiffusiveModel& model, const Mat2& rho, std::span<const double> innovations,
                double dt) {
  std::array<double, 8> buffer{};
  if (model.channels.size() > buffer.size()) throw ConfigError("too many measured channels");
  std::span<double> records(buffer.data(), model.channels.size());
  records_from_innovations(model, rho, innovations, dt, records);
  return renormalize(kraus_update(model, rho, records, dt));
}

}  // namespace qjumps
