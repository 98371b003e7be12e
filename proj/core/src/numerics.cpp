#include "cab/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace cab::numerics {

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NonFiniteInput(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const DenseVector& v, const char* what) {
  if (!v.allFinite()) {
    throw NonFiniteInput(std::string(what) + ": non-finite entry");
  }
}

std::size_t QrFactorization::numerical_rank(double rel_tol) const {
  const Eigen::Index k = r.cols();
  if (k == 0) return 0;
  const DenseVector diag = r.diagonal().cwiseAbs();
  const double top = diag.maxCoeff();
  if (top == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (diag(i) > rel_tol * top) ++rank;
  }
  return rank;
}

QrFactorization qr_factorize(const DenseMatrix& m) {
  if (m.rows() < m.cols()) {
    throw DimensionMismatch("qr_factorize: rows < cols");
  }
  require_finite(m, "qr_factorize");
  const Eigen::HouseholderQR<DenseMatrix> qr(m);
  QrFactorization out;
  out.q = qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
  out.r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  // Nonnegative diagonal of R makes the factorization unique for full rank m.
  for (Eigen::Index i = 0; i < out.r.rows(); ++i) {
    if (out.r(i, i) < 0.0) {
      out.r.row(i) *= -1.0;
      out.q.col(i) *= -1.0;
    }
  }
  return out;
}

DenseMatrix orthogonal_complement_basis(const DenseMatrix& m) {
  if (m.rows() < m.cols()) {
    throw DimensionMismatch("orthogonal_complement_basis: rows < cols");
  }
  require_finite(m, "orthogonal_complement_basis");
  const Eigen::HouseholderQR<DenseMatrix> qr(m);
  const DenseMatrix full = qr.householderQ();
  return full.rightCols(m.rows() - m.cols());
}

DenseVector project_onto_range(const DenseMatrix& q, const DenseVector& s) {
  if (q.rows() != s.size()) {
    throw DimensionMismatch("project_onto_range: basis rows != vector dim");
  }
  const DenseVector coeffs = q.transpose() * s;
  return q * coeffs;
}

DenseVector least_squares_min_norm(const DenseMatrix& m, const DenseVector& b) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw DimensionMismatch("least_squares_min_norm: empty matrix");
  }
  if (m.rows() != b.size()) {
    throw DimensionMismatch("least_squares_min_norm: rows != rhs dim");
  }
  require_finite(m, "least_squares_min_norm");
  require_finite(b, "least_squares_min_norm");
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(m);
  return cod.solve(b);
}

DenseVector singular_values(const DenseMatrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return DenseVector(0);
  // BDCSVD falls back to Jacobi for small blocks; values come out sorted.
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues();
}

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

DenseMatrix read_matrix(std::istream& is) {
  long long rows = -1;
  long long cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw FormatError("matrix header must be 'ROWS COLS'");
  }
  DenseMatrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      std::string token;
      if (!(is >> token)) {
        throw FormatError("matrix body truncated at row " + std::to_string(i));
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw FormatError("bad matrix entry '" + token + "'");
      }
      m(i, j) = v;
    }
  }
  std::string extra;
  if (is >> extra) {
    throw FormatError("trailing data after matrix body");
  }
  require_finite(m, "read_matrix");
  return m;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix(os, m);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_matrix(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

DenseVector read_vector_file(const std::filesystem::path& path) {
  DenseMatrix m = read_matrix_file(path);
  if (m.cols() != 1) {
    throw FormatError(path.string() + ": expected a single column");
  }
  return m.col(0);
}

}  // namespace cab::numerics
