#pragma once

#include <cstdint>
#include <random>

namespace qjumps {

std::uint64_t splitmix64(std::uint64_t x);

/// Engine plus the two distributions every sampler here needs. One per trajectory.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform on (0, 1], safe to feed into a log or an inverse CDF.
  double uniform_open() { return 1.0 - uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Deterministic substream for (master seed, stream tag, index); independent of scheduling.
RandomStream substream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index);

/// Stream tags keep the different consumers of one master seed apart.
namespace stream_tag {
inline constexpr std::uint64_t said = 0x5a1d;
inline constexpr std::uint64_t homodyne = 0x40d7;
inline constexpr std::uint64_t bob = 0xb0b;
inline constexpr std::uint64_t bootstrap = 0xb007;
inline constexpr std::uint64_t null_model = 0x0d0b;
inline constexpr std::uint64_t validate = 0x7a11;
}  // namespace stream_tag

}  // namespace qjumps
