#pragma once

#include <cstdint>
#include <vector>

#include "qjumps/bloch_state.hpp"

namespace qjumps {

enum class SaidChannel { side_minus, central, side_plus };

struct JumpEvent {
  double time = 0.0;
  SaidChannel channel = SaidChannel::central;
  int post_state = +1;   // +1 for |+⟩, −1 for |−⟩
  double pre_x = 0.0;    // normalized ⟨σx⟩ just before the jump
};

/// One run: normalized conditional states at the requested times plus jump metadata.
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::vector<double> times;
  std::vector<BlochState> samples;
  std::vector<JumpEvent> jumps;
  std::size_t jump_count = 0;
};

/// Sample times t_k = burn_in + k·stride, k = 0..count−1.
std::vector<double> stationary_schedule(double burn_in, double stride, std::size_t count);

}  // namespace qjumps
