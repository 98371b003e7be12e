#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cab {

/// C(n, k), saturating at UINT64_MAX on overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Colexicographic rank of a strictly increasing k-subset {c_1 < ... < c_k}:
/// sum_i C(c_i, i). Bijective onto [0, C(n, k)).
std::uint64_t colex_rank(std::span<const std::size_t> subset);

/// Inverse of colex_rank for subsets of {0, ..., n-1} of size k.
std::vector<std::size_t> colex_unrank(std::uint64_t rank, std::size_t n, std::size_t k);

/// floor(log2 C(n, k)), the number of whole bits a k-subset of [n] carries.
unsigned subset_capacity_bits(std::size_t n, std::size_t k);

}  // namespace cab
