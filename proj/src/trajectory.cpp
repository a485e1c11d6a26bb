#include "qjumps/trajectory.hpp"

namespace qjumps {

std::vector<double> stationary_schedule(double burn_in, double stride, std::size_t count) {
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = burn_in + stride * static_cast<double>(k);
  return times;
}

}  // namespace qjumps
