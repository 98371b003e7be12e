#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent sub-seed from (seed, a, b). Used for
/// (base_seed, cell, trial) and for per-component streams of one instance.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Counter-based generator: the i-th 64-bit output is mix64(key + (i+1)*G)
/// with G = 0x9E3779B97F4A7C15 (SplitMix64). Gaussians use the Box-Muller
/// transform on two consecutive uniforms; this transform is fixed so that a
/// given seed reproduces bit-identical draws within this implementation.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform on (0, 1): 53 random bits, never exactly 0 or 1.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  double gaussian();
  /// +1 or -1 with equal probability.
  double sign();

  /// Uniformly random size-k subset of {0, ..., n-1}, sorted increasing.
  std::vector<std::size_t> subset(std::size_t n, std::size_t k);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cab
