#pragma once

#include <cstdint>
#include <random>

namespace qrl {

// Deterministic random source. All randomness in the library flows through
// this class so that a run is reproducible from its 64-bit seed alone.
//
// std::mt19937_64 produces a sequence pinned by the C++ standard, and the
// derivations below (53-bit doubles, rejection-sampled bounded ints) are
// spelled out here rather than delegated to <random> distributions, whose
// algorithms are implementation-defined and vary across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1): top 53 bits of one engine draw.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via rejection sampling; bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  // Independent stream for worker `stream`, derived from this rng's seed.
  // Uses splitmix64 so streams 0, 1, 2, ... are decorrelated even though
  // the inputs differ by one bit.
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qrl
