#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hzn {

/// SplitMix64 finalizer. Used to spread seed material and to derive
/// per-stream seeds from a base seed plus stream labels.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a string, for folding identifiers into seed material.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic combination of a seed with a stream index or label hash.
/// seed_combine(a, b) != seed_combine(b, a) by design; order carries meaning.
constexpr std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

/** Seeded random stream with portable output.
 *
 * std::mt19937_64 supplies the raw bits (its sequence is pinned by the
 * standard). Uniform and normal draws are derived here instead of going
 * through std::uniform_real_distribution / std::normal_distribution, whose
 * output is implementation-defined; this keeps every generated series
 * bit-identical across standard libraries.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw via the Box-Muller transform. Draws are produced
  /// in pairs; the spare is cached, so draw parity is part of the stream.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hzn
