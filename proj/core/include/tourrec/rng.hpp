#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace tourrec {

/// Seedable generator with a platform-independent output stream.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The standard distributions are not (their algorithms are left to the
/// library vendor), so bounded draws are implemented here on top of the raw
/// 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double unit();

  bool chance(double p) { return unit() < p; }

  /// Index drawn with probability proportional to weights[i]. At least one
  /// weight must be positive.
  std::size_t weighted(std::span<const double> weights);

  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a; used to derive per-stage seeds from a tag.
std::uint64_t fnv1a(std::string_view text) noexcept;

/// Seed for a named pipeline stage: base + fnv1a(tag) (wrapping).
inline std::uint64_t stage_seed(std::uint64_t base, std::string_view tag) noexcept {
  return base + fnv1a(tag);
}

}  // namespace tourrec
