#pragma once

// Payload transmission over a grossly corrupted real channel. Each symbol of
// floor(log2 C(n, k1)) bits selects a k1-subset of [n] through the colex
// combinatorial number system; the codeword is A x0 with x0 the indicator of
// that subset.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cab/solver.hpp"

namespace cab::channel {

struct ChannelParams {
  std::size_t m = 400;
  std::size_t n = 100;
  double nu = 0.05;
  std::size_t k1 = 5;
  double rho = 0.0;
};

struct ChannelRun {
  std::string payload_bits;  // '0' / '1'
  std::size_t k1 = 0;
  double rho = 0.0;
  std::string decoded_bits;
  bool exact = false;
  unsigned bits_per_symbol = 0;
  std::size_t symbols = 0;
  /// Per symbol: the decoder passed judge_success.
  std::vector<bool> symbol_success;
  /// Per symbol: the thresholded support was a valid k1-subset whose index
  /// fits the symbol width.
  std::vector<bool> symbol_decoded;
};

/// Bits per symbol. Throws std::invalid_argument when C(n, k1) < 2.
unsigned symbol_capacity(std::size_t n, std::size_t k1);

/// payload_bits must consist of '0' and '1'. The last symbol is zero padded.
ChannelRun channel_roundtrip(const std::string& payload_bits, const ChannelParams& params, std::uint64_t seed,
                             const solver::SolveOptions& opts = {});

/// Big-endian bit string of the bytes of `text`.
std::string bits_from_text(const std::string& text);
/// Uniform random bit string of the given length.
std::string random_bits(std::size_t length, std::uint64_t seed);

}  // namespace cab::channel
