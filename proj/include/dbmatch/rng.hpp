#pragma once

#include <cstdint>

namespace dbmatch {

// All randomness in the library flows through SplitMix64 (Steele, Lea, Vigna,
// "Fast splittable pseudorandom number generators", OOPSLA 2014). It is a
// counter-based generator: the state advances by a fixed odd constant and the
// output is a bijective finalizer of the counter, so independent streams can be
// derived by decorrelating the counter with the same finalizer. That single
// published mixing function, mix64 below, is also the seed-derivation rule used
// everywhere (per-row streams, per-trial stages), which is what makes runs
// reproducible regardless of worker count or evaluation order.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer (Stafford mix 13 variant used by the reference
// implementation).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives the seed of an independent child stream. Distinct stream indices give
// distinct counters, hence decorrelated SplitMix64 sequences. The +1 keeps
// derive_seed(s, 0) != s.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGoldenGamma * (stream + 1));
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform double in [0, 1) with 53 significant bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
  // draw exactly uniform (no modulo bias), which the permutation uniformity
  // tests rely on.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace dbmatch
