#pragma once

#include <cstdint>

namespace pburgers {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream key of unit cell (i, j) under a master seed.
constexpr std::uint64_t cell_key(std::uint64_t seed, std::int64_t i, std::int64_t j) noexcept {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ static_cast<std::uint64_t>(i));
  h = mix64(h ^ (static_cast<std::uint64_t>(j) * 0xd1b54a32d192ed03ULL));
  return h;
}

/// Seed of replica `index` under a master seed. Distinct indices give
/// distinct seeds because mix64 is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + index);
}

/// Counter-based generator: the n-th draw is a pure function of (key, n).
class CellRng {
 public:
  explicit constexpr CellRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pburgers
