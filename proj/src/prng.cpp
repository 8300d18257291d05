#include "molu/prng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molu::data {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeededPrng::SeededPrng(std::uint64_t seed, std::uint64_t stream) : seed_(seed) {
  std::uint64_t mix = stream;
  std::uint64_t sm = seed ^ splitmix64(mix);
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t SeededPrng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double SeededPrng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SeededPrng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededPrng::below: bound must be positive");
  // Reject the low partial bucket so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double gaussian(SeededPrng& prng, double mean, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian: sigma must be non-negative");
  const double u1 = 1.0 - prng.uniform();  // (0, 1], keeps log finite
  const double u2 = prng.uniform();
  if (sigma == 0.0) return mean;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace molu::data
