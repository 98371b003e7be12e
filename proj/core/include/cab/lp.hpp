#pragma once

// Mehrotra predictor-corrector interior-point method for standard-form LPs
//
//   minimize c^T z  subject to  K z = b,  z >= 0.
//
// K is supplied through a ConstraintOperator so that structured constraint
// matrices (the split l1 programs) can assemble and factor their normal
// equations K D K^T without materializing K.

#include <cstddef>
#include <memory>
#include <optional>

#include <Eigen/Cholesky>

#include "cab/numerics.hpp"

namespace cab::lp {

class ConstraintOperator {
 public:
  virtual ~ConstraintOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual DenseVector apply(const DenseVector& z) const = 0;            // K z
  virtual DenseVector apply_transpose(const DenseVector& v) const = 0;  // K^T v

  /// Prepares solves with K diag(d) K^T. Returns false if the matrix could
  /// not be factored even after regularization.
  virtual bool factor(const DenseVector& d) = 0;
  /// Solves (K diag(d) K^T) u = r for the d of the last factor() call.
  virtual DenseVector solve(const DenseVector& r) const = 0;
};

/// Explicit dense K.
class DenseConstraint final : public ConstraintOperator {
 public:
  explicit DenseConstraint(DenseMatrix k) : k_(std::move(k)) {}

  Eigen::Index rows() const override { return k_.rows(); }
  Eigen::Index cols() const override { return k_.cols(); }
  DenseVector apply(const DenseVector& z) const override { return k_ * z; }
  DenseVector apply_transpose(const DenseVector& v) const override { return k_.transpose() * v; }
  bool factor(const DenseVector& d) override;
  DenseVector solve(const DenseVector& r) const override;

 private:
  DenseMatrix k_;
  DenseVector d_;
  Eigen::LLT<DenseMatrix> llt_;
};

/// K = [M, -M] or, with_identity, K = [M, -M, I, -I]: the split form of
/// M u (+ v) = b with u = u+ - u-, v = v+ - v-. Normal matrix
/// M (d1 + d2) M^T (+ diag(d3 + d4)), assembled at rows x rows and refined
/// against the exact normal operator after each Cholesky solve.
class SplitL1Constraint final : public ConstraintOperator {
 public:
  SplitL1Constraint(DenseMatrix m, bool with_identity);

  Eigen::Index rows() const override { return m_.rows(); }
  Eigen::Index cols() const override;
  DenseVector apply(const DenseVector& z) const override;
  DenseVector apply_transpose(const DenseVector& v) const override;
  bool factor(const DenseVector& d) override;
  DenseVector solve(const DenseVector& r) const override;

 private:
  DenseVector normal_apply(const DenseVector& u) const;

  DenseMatrix m_;
  bool with_identity_;
  DenseVector du_;  // d1 + d2, length m.cols()
  DenseVector dv_;  // d3 + d4, length m.rows() (identity block only)
  Eigen::LLT<DenseMatrix> llt_;
};

enum class LpStatus { Optimal, IterationLimit, NumericalFailure };

struct LpOptions {
  double gap_tolerance = 1e-8;          // relative duality gap
  double feasibility_tolerance = 1e-9;  // relative primal / dual residual
  std::size_t max_iterations = 200;
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  DenseVector z;  // primal
  DenseVector v;  // equality multipliers
  DenseVector s;  // reduced costs
  double objective = 0.0;
  double primal_residual = 0.0;  // ||b - K z||_2
  double dual_residual = 0.0;    // ||c - K^T v - s||_2
  double duality_gap = 0.0;      // |c^T z - b^T v| / (1 + |c^T z|)
  std::size_t iterations = 0;
};

LpResult solve_standard_form(ConstraintOperator& k, const DenseVector& b, const DenseVector& c,
                             const LpOptions& opts = {});

}  // namespace cab::lp
