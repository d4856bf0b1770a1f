#pragma once

#include <cstdint>
#include <string_view>

namespace pcouple {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i of stream s is mix64(key(seed, s) + (i+1) * gamma).
/// Streams are independent functions of (seed, stream index), so any
/// partition of replications into streams is reproducible on every platform.
class CounterRng {
 public:
  static constexpr std::string_view kName = "splitmix64-counter-v1";
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream + kGamma))) {}

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform on the open interval (0,1): (x + 1/2) 2^-52 for a 52-bit x, so
  /// the extremes are 2^-53 and 1 - 2^-53.
  constexpr double next_open_uniform() noexcept {
    const auto x = next_u64() >> 12;
    return (static_cast<double>(x) + 0.5) * 0x1.0p-52;
  }

  constexpr std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pcouple
