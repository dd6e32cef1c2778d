#pragma once

#include <cstdint>
#include <random>

namespace rotp {

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for the index-th member of a family rooted at `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

/// Seedable random source injected into every stochastic operation.
///
/// Draws are defined in terms of raw mt19937_64 output only (no std
/// distributions), so a given seed yields the same stream on every
/// platform and standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bit() { return (engine_() >> 63) != 0; }

  /// Uniform integer in [0, n), unbiased by rejection. n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  /// Fresh independent stream; advances this one.
  RandomStream split() { return RandomStream(engine_()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rotp
