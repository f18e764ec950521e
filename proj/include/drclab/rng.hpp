#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace drclab {

/// Seed for every stochastic generator in the library. Identical seeds
/// produce bit-identical output streams across runs.
struct RngSeed {
  std::uint64_t value = 0;
};

// splitmix64: a counter-based 64-bit generator (Steele et al.). The state
// advances by a fixed odd constant, so the n-th output is a pure function
// of (seed, n).
class SplitMix64 {
 public:
  explicit SplitMix64(RngSeed seed) : state_(seed.value) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0, 1].
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard Gaussian via Box-Muller. Draws two uniforms per pair.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Derives an independent stream for substream `index`.
  RngSeed fork(std::uint64_t index) {
    SplitMix64 mixer(RngSeed{state_ ^ (0xa0761d6478bd642full * (index + 1))});
    return RngSeed{mixer.next_u64()};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace drclab
