#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace gsfa {

/// Counter-based generator: draw i of stream `seed` is
///
///   z = seed + (i + 1) · 0x9E3779B97F4A7C15            (mod 2⁶⁴)
///   z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) · 0x94D049BB133111EB
///   out = z ^ (z >> 31)
///
/// which is the SplitMix64 output sequence, so any draw can be recomputed
/// from (seed, i) alone. Uniforms use the top 53 bits; normals use the cosine
/// branch of Box–Muller on two consecutive uniforms.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t i) { return mix(seed + (i + 1) * kGolden); }

  /// Independent sub-stream seed derived from a parent seed and a tag.
  static constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return mix(seed ^ h);
  }

  std::uint64_t next_u64() { return at(seed_, counter_++); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), by rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % n));
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace gsfa
