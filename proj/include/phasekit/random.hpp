#pragma once

#include <cstdint>
#include <random>

namespace phasekit {

/// SplitMix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. Substreams keyed by (seed, key_a, key_b) are
/// reproducible independently of scheduling, so parallel sweeps stay
/// deterministic.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t key_a,
                                std::uint64_t key_b = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (key_a + 0x9e3779b97f4a7c15ULL));
    s = splitmix64(s ^ (key_b + 0xbf58476d1ce4e5b9ULL));
    return RandomStream(s);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace phasekit
