#pragma once

#include <cstdint>

namespace effcap {

// Counter-based uniform generator (splitmix64 finalizer over seed + index).
// Draw i depends only on (seed, stream, i), so any block's variate can be
// regenerated without replaying the sequence and independent of batching.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed + kGamma * (stream + 1))) {}

  // Uniform in (0, 1]; never returns 0, safe inside log().
  double uniform_at(std::uint64_t index) const noexcept {
    const std::uint64_t bits = mix(key_ + (index + 1) * kGamma);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_uniform() noexcept { return uniform_at(counter_++); }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace effcap
