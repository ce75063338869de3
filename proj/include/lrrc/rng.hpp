#pragma once

#include <cstdint>

namespace lrrc {

/// Counter-based generator: the i-th output is splitmix64(seed + (i+1) * golden).
/// Streams are reproducible from (seed, counter) alone, so sub-streams for
/// simulation rounds are derived with `derive` instead of sharing state.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
  }

  std::uint64_t next() { return mix(seed_ + (++counter_) * kGolden); }

  /// Uniform in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Independent seed for a labelled sub-stream (e.g. a simulation round).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t label) {
    return mix(mix(seed ^ 0xD1B54A32D192ED03ULL) + label * kGolden);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace lrrc
