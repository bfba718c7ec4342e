#pragma once

#include <cstdint>

namespace pedflow {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of replicate `index` under `master_seed`.
constexpr std::uint64_t replicate_key(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed ^ 0x5851f42d4c957f2dULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based stream: draw k is mix64(key + k * golden_gamma).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }
  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  constexpr std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pedflow
