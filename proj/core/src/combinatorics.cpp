#include "cab/combinatorics.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace cab {

namespace {
__extension__ using Wide = unsigned __int128;
}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  Wide acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // acc * (n - k + i) / i stays integral at every step.
    acc = acc * (n - k + i) / i;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t colex_rank(std::span<const std::size_t> subset) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0 && subset[i] <= subset[i - 1]) {
      throw std::invalid_argument("colex_rank: subset must be strictly increasing");
    }
    rank += binomial(subset[i], i + 1);
  }
  return rank;
}

std::vector<std::size_t> colex_unrank(std::uint64_t rank, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("colex_unrank: k > n");
  if (rank >= binomial(n, k)) throw std::out_of_range("colex_unrank: rank out of range");
  std::vector<std::size_t> out(k);
  std::size_t upper = n;
  for (std::size_t i = k; i >= 1; --i) {
    // Largest c < upper with C(c, i) <= rank.
    std::size_t c = upper - 1;
    while (binomial(c, i) > rank) --c;
    out[i - 1] = c;
    rank -= binomial(c, i);
    upper = c;
  }
  return out;
}

unsigned subset_capacity_bits(std::size_t n, std::size_t k) {
  const std::uint64_t count = binomial(n, k);
  if (count == 0) return 0;
  return static_cast<unsigned>(std::bit_width(count) - 1);
}

}  // namespace cab
