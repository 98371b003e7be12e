#pragma once

// l1 decoders built on the interior-point LP core:
//   extended l1    min ||x||_1 + ||e||_1  s.t.  A x + e = y
//   basis pursuit  min ||e||_1            s.t.  B e = c

#include <cstddef>
#include <string_view>

#include "cab/lp.hpp"
#include "cab/model.hpp"
#include "cab/numerics.hpp"

namespace cab::solver {

struct SolveOptions {
  double primal_dual_tolerance = 1e-8;  // relative duality gap
  double feasibility_tolerance = 1e-9;  // relative primal residual
  std::size_t max_iterations = 200;
  double success_threshold = 0.01;

  void validate() const;
  lp::LpOptions lp_options() const;
};

enum class SolveStatus { Optimal, IterationLimit, Infeasible, NumericalFailure };

std::string_view to_string(SolveStatus s);

struct RecoverySolution {
  DenseVector x_hat;
  DenseVector e_hat;
  double objective = 0.0;  // ||x_hat||_1 + ||e_hat||_1
  SolveStatus status = SolveStatus::NumericalFailure;
  std::size_t iterations = 0;
  double primal_residual = 0.0;  // ||A x_hat + e_hat - y||_2
  double duality_gap = 0.0;
};

/// Extended l1 program via variable splitting x = x+ - x-, e = e+ - e-.
/// x is not sign constrained.
RecoverySolution solve_extended_l1(const DenseMatrix& a, const DenseVector& y,
                                   const SolveOptions& opts = {});

struct BasisPursuitSolution {
  DenseVector e;
  double objective = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  std::size_t iterations = 0;
  double primal_residual = 0.0;  // ||B e - c||_2
  double duality_gap = 0.0;
};

/// Requires B.rows <= B.cols. Infeasible when c is not in range(B).
BasisPursuitSolution solve_basis_pursuit(const DenseMatrix& b, const DenseVector& c,
                                         const SolveOptions& opts = {});

/// max(||x_hat - x0||_inf, ||e_hat - e0||_inf) < threshold.
bool judge_success(const RecoverySolution& sol, const model::ProblemInstance& inst,
                   double threshold);

/// max(||x_hat - x0||_inf, ||e_hat - e0||_inf).
double recovery_deviation(const RecoverySolution& sol, const model::ProblemInstance& inst);

}  // namespace cab::solver
