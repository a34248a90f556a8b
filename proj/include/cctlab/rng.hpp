#pragma once

#include <cstdint>
#include <random>

namespace cct {

/// SplitMix64 finaliser over (seed, stream): decorrelated 64-bit seeds for
/// independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// A reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions below are implemented
/// here because the standard library ones differ between vendors.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform on the closed range [lo, hi]; unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cct
