#include "qjumps/random.hpp"

namespace qjumps {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
  engine_.seed(seq);
}

RandomStream substream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index) {
  const std::uint64_t h = splitmix64(splitmix64(master_seed ^ splitmix64(tag)) + index);
  return RandomStream(h);
}

}  // namespace qjumps
