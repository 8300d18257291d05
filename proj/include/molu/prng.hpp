#pragma once

#include <array>
#include <cstdint>

namespace molu::data {

/// xoshiro256** (Blackman & Vigna, 2018), seeded by expanding (seed, stream)
/// through splitmix64. The algorithm is fixed so that streams are identical
/// across compilers and standard libraries.
///
/// Every call to next() advances the state by exactly one step; uniform()
/// consumes one step and gaussian() consumes two.
class SeededPrng {
 public:
  using result_type = std::uint64_t;

  explicit SeededPrng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Box-Muller draw from N(mean, sigma^2). Uses two uniforms per call and keeps
/// no spare value, so the generator state alone determines the next draw.
/// sigma == 0 returns `mean` exactly.
double gaussian(SeededPrng& prng, double mean, double sigma);

/// Stream identifiers so that one user-facing seed can drive several
/// independent draws (weight init, noise, batch order) without overlap.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kShuffle = 3;
}  // namespace streams

}  // namespace molu::data
