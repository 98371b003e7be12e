#include "cab/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace cab::solver {

namespace {

SolveStatus from_lp(lp::LpStatus s) {
  switch (s) {
    case lp::LpStatus::Optimal: return SolveStatus::Optimal;
    case lp::LpStatus::IterationLimit: return SolveStatus::IterationLimit;
    case lp::LpStatus::NumericalFailure: return SolveStatus::NumericalFailure;
  }
  return SolveStatus::NumericalFailure;
}

}  // namespace

void SolveOptions::validate() const {
  if (!(primal_dual_tolerance > 0.0)) throw std::invalid_argument("SolveOptions: tolerance must be > 0");
  if (!(feasibility_tolerance > 0.0)) throw std::invalid_argument("SolveOptions: tolerance must be > 0");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("SolveOptions: threshold must be > 0");
}

lp::LpOptions SolveOptions::lp_options() const {
  lp::LpOptions o;
  o.gap_tolerance = primal_dual_tolerance;
  o.feasibility_tolerance = feasibility_tolerance;
  o.max_iterations = max_iterations;
  return o;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

RecoverySolution solve_extended_l1(const DenseMatrix& a, const DenseVector& y, const SolveOptions& opts) {
  opts.validate();
  if (a.rows() != y.size()) throw DimensionMismatch("solve_extended_l1: A.rows != y.dim");
  numerics::require_finite(a, "solve_extended_l1(A)");
  numerics::require_finite(y, "solve_extended_l1(y)");
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();

  RecoverySolution sol;
  if (y.isZero(0.0)) {
    sol.x_hat = DenseVector::Zero(n);
    sol.e_hat = DenseVector::Zero(m);
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  lp::SplitL1Constraint k(a, /*with_identity=*/true);
  const DenseVector cost = DenseVector::Ones(k.cols());
  const lp::LpResult r = lp::solve_standard_form(k, y, cost, opts.lp_options());

  sol.status = from_lp(r.status);
  sol.iterations = r.iterations;
  sol.duality_gap = r.duality_gap;
  sol.x_hat = r.z.segment(0, n) - r.z.segment(n, n);
  sol.e_hat = r.z.segment(2 * n, m) - r.z.segment(2 * n + m, m);
  sol.objective = sol.x_hat.lpNorm<1>() + sol.e_hat.lpNorm<1>();
  sol.primal_residual = (a * sol.x_hat + sol.e_hat - y).norm();
  return sol;
}

BasisPursuitSolution solve_basis_pursuit(const DenseMatrix& b, const DenseVector& c, const SolveOptions& opts) {
  opts.validate();
  if (b.rows() > b.cols()) throw DimensionMismatch("solve_basis_pursuit: B must have rows <= cols");
  if (b.rows() != c.size()) throw DimensionMismatch("solve_basis_pursuit: B.rows != c.dim");
  numerics::require_finite(b, "solve_basis_pursuit(B)");
  numerics::require_finite(c, "solve_basis_pursuit(c)");

  BasisPursuitSolution sol;
  if (c.isZero(0.0)) {
    sol.e = DenseVector::Zero(b.cols());
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  // c must lie in range(B); the LP core assumes a consistent system.
  const DenseVector ls = numerics::least_squares_min_norm(b, c);
  const double ls_resid = (b * ls - c).norm();
  if (ls_resid > 1e-8 * (1.0 + c.norm())) {
    sol.e = ls;
    sol.status = SolveStatus::Infeasible;
    sol.primal_residual = ls_resid;
    return sol;
  }

  const Eigen::Index n = b.cols();
  lp::SplitL1Constraint k(b, /*with_identity=*/false);
  const DenseVector cost = DenseVector::Ones(k.cols());
  const lp::LpResult r = lp::solve_standard_form(k, c, cost, opts.lp_options());

  sol.status = from_lp(r.status);
  sol.iterations = r.iterations;
  sol.duality_gap = r.duality_gap;
  sol.e = r.z.segment(0, n) - r.z.segment(n, n);
  sol.objective = sol.e.lpNorm<1>();
  sol.primal_residual = (b * sol.e - c).norm();
  return sol;
}

double recovery_deviation(const RecoverySolution& sol, const model::ProblemInstance& inst) {
  if (sol.x_hat.size() != inst.x0.size() || sol.e_hat.size() != inst.e0.size()) {
    throw DimensionMismatch("recovery_deviation: solution / instance dimensions differ");
  }
  const double dx = sol.x_hat.size() > 0 ? (sol.x_hat - inst.x0).cwiseAbs().maxCoeff() : 0.0;
  const double de = sol.e_hat.size() > 0 ? (sol.e_hat - inst.e0).cwiseAbs().maxCoeff() : 0.0;
  return std::max(dx, de);
}

bool judge_success(const RecoverySolution& sol, const model::ProblemInstance& inst, double threshold) {
  const double dev = recovery_deviation(sol, inst);
  return std::isfinite(dev) && dev < threshold;
}

}  // namespace cab::solver
