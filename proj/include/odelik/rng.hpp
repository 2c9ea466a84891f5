#pragma once

#include <cstdint>

namespace odelik {

/// Deterministic 64-bit generator built on the splitmix64 finalizer.
///
/// Bit-for-bit identical on every platform for a given seed, unlike the
/// standard-library distributions. Benchmark output is reproducible across
/// machines, so the mixing constants below are part of the output contract
/// and must not change.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return finalize(state_);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Independent stream seed for a labelled subtask, e.g. one benchmark
  /// sample. Same (seed, labels) always yields the same stream.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = finalize(seed + 0x9e3779b97f4a7c15ull);
    h = finalize(h ^ (a + 0xbf58476d1ce4e5b9ull));
    h = finalize(h ^ (b + 0x94d049bb133111ebull));
    h = finalize(h ^ (c + 0x2545f4914f6cdd1dull));
    return h;
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace odelik
