#pragma once

// Competitor decoders for the extended l1 program.
//
// Orthogonal complement: annihilate the signal with B, B A = 0, decode the
// error by basis pursuit on B e = B y, then fit x by least squares.
//
// Greedy pursuit on the combined dictionary [A I]. Correlations use unit-norm
// atoms; least-squares fits use the raw columns. ROMP picks, among the top
// candidates, the contiguous group of comparable correlations (max/min <= 2)
// with the largest energy.

#include <cstddef>
#include <string_view>
#include <vector>

#include "cab/numerics.hpp"
#include "cab/solver.hpp"

namespace cab::baselines {

/// Requires n < m and A of full column rank.
solver::RecoverySolution orthogonal_complement_decode(const DenseMatrix& a, const DenseVector& y,
                                                      const solver::SolveOptions& opts = {});

enum class GreedyVariant { OMP, ROMP };

std::string_view to_string(GreedyVariant v);

struct GreedyOptions {
  /// Support budget over the m + n atoms; 0 selects m / 2.
  std::size_t max_atoms = 0;
  /// Stop once ||r||_2 <= residual_tolerance * ||y||_2.
  double residual_tolerance = 1e-10;
  GreedyVariant variant = GreedyVariant::OMP;

  void validate(std::size_t m, std::size_t n) const;
};

struct GreedySolution {
  solver::RecoverySolution solution;
  /// Selected dictionary indices in selection order: j < n is column j of A,
  /// j >= n is the standard basis vector e_{j - n}.
  std::vector<std::size_t> atoms;
  /// ||r||_2 before the first round and after every round.
  std::vector<double> residual_norms;
};

/// Support budget for a known pattern size k1 + k2: OMP gets k1 + k2, ROMP
/// gets 2 (k1 + k2) (its usual stopping rule |I| >= 2s), both capped at m + n.
std::size_t default_max_atoms(GreedyVariant v, std::size_t k1, std::size_t k2, std::size_t m, std::size_t n);

GreedySolution greedy_decode(const DenseMatrix& a, const DenseVector& y, const GreedyOptions& opts = {});

}  // namespace cab::baselines
