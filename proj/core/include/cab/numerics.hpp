#pragma once

// Dense real linear algebra shared by every other module: Householder QR,
// range projections, minimum-norm least squares, singular values, and the
// plain-text matrix format used for serialized instances.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cab {

/// Column-major, 64-bit dense matrix. Entries must be finite at every
/// module boundary; see require_finite().
using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cab

namespace cab::numerics {

void require_finite(const DenseMatrix& m, const char* what);
void require_finite(const DenseVector& v, const char* what);

/// Thin Householder QR of a tall matrix: q is rows x cols with orthonormal
/// columns, r is cols x cols upper triangular with r(i, i) >= 0, q * r == m.
struct QrFactorization {
  DenseMatrix q;
  DenseMatrix r;

  /// Number of |R(i,i)| above rel_tol * max_i |R(i,i)|.
  std::size_t numerical_rank(double rel_tol = 1e-10) const;
  bool full_column_rank(double rel_tol = 1e-10) const {
    return numerical_rank(rel_tol) == static_cast<std::size_t>(r.cols());
  }
};

QrFactorization qr_factorize(const DenseMatrix& m);

/// Orthonormal basis (as columns) of range(m)^perp, i.e. the trailing
/// rows - cols columns of the full Householder Q. Requires rows >= cols.
DenseMatrix orthogonal_complement_basis(const DenseMatrix& m);

/// q * (q^T s) for a matrix q with orthonormal columns.
DenseVector project_onto_range(const DenseMatrix& q, const DenseVector& s);

/// argmin ||m x - b||_2, minimum-norm among minimizers. Works for tall, wide
/// and rank-deficient m (complete orthogonal decomposition).
DenseVector least_squares_min_norm(const DenseMatrix& m, const DenseVector& b);

/// Nonincreasing singular values, length min(rows, cols).
DenseVector singular_values(const DenseMatrix& m);

// Text format: first line "ROWS COLS", then one whitespace-separated row per
// line, 17 significant digits. Vectors are written as COLS == 1.
void write_matrix(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& is);
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix_file(const std::filesystem::path& path);
DenseVector read_vector_file(const std::filesystem::path& path);

}  // namespace cab::numerics
