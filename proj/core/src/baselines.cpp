#include "cab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cab::baselines {

namespace {

constexpr double kDependentAtom = 1e-10;

// Incrementally maintained orthonormal basis of the selected atoms.
class OrthoBasis {
 public:
  explicit OrthoBasis(Eigen::Index rows) : q_(rows, 0) {}

  /// Appends the normalized component of v orthogonal to the basis; false
  /// when v is numerically inside the current span.
  bool push(const DenseVector& v) {
    DenseVector u = v;
    for (int pass = 0; pass < 2; ++pass) {
      if (q_.cols() > 0) u -= q_ * (q_.transpose() * u);
    }
    const double norm = u.norm();
    if (!(norm > kDependentAtom * std::max(v.norm(), 1e-300))) return false;
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = u / norm;
    return true;
  }

  DenseVector residual(const DenseVector& y) const {
    if (q_.cols() == 0) return y;
    return y - q_ * (q_.transpose() * y);
  }

  Eigen::Index size() const { return q_.cols(); }

 private:
  DenseMatrix q_;
};

DenseVector atom(const DenseMatrix& a, std::size_t j) {
  const auto n = static_cast<std::size_t>(a.cols());
  if (j < n) return a.col(static_cast<Eigen::Index>(j));
  DenseVector e = DenseVector::Zero(a.rows());
  e(static_cast<Eigen::Index>(j - n)) = 1.0;
  return e;
}

// Candidate indices for this round, best first.
std::vector<std::size_t> select_round(const DenseVector& corr, const std::vector<bool>& blocked,
                                      GreedyVariant variant, std::size_t top, std::size_t budget) {
  std::vector<std::size_t> order;
  for (Eigen::Index j = 0; j < corr.size(); ++j) {
    if (!blocked[static_cast<std::size_t>(j)] && corr(j) > 0.0) order.push_back(static_cast<std::size_t>(j));
  }
  if (order.empty() || budget == 0) return {};
  const auto by_corr = [&](std::size_t l, std::size_t r) {
    const double cl = corr(static_cast<Eigen::Index>(l));
    const double cr = corr(static_cast<Eigen::Index>(r));
    return cl != cr ? cl > cr : l < r;
  };
  if (variant == GreedyVariant::OMP) {
    return {*std::min_element(order.begin(), order.end(), by_corr)};
  }

  const std::size_t s = std::min(top, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(), by_corr);
  order.resize(s);

  // Maximal-energy window [lo, hi) of the sorted list with c_lo <= 2 c_{hi-1}.
  std::size_t best_lo = 0;
  std::size_t best_hi = 1;
  double best_energy = -1.0;
  std::size_t hi = 0;
  double energy = 0.0;
  for (std::size_t lo = 0; lo < s; ++lo) {
    if (hi < lo) {
      hi = lo;
      energy = 0.0;
    }
    const double head = corr(static_cast<Eigen::Index>(order[lo]));
    while (hi < s && head <= 2.0 * corr(static_cast<Eigen::Index>(order[hi]))) {
      const double c = corr(static_cast<Eigen::Index>(order[hi]));
      energy += c * c;
      ++hi;
    }
    if (energy > best_energy) {
      best_energy = energy;
      best_lo = lo;
      best_hi = hi;
    }
    energy -= head * head;
  }
  std::vector<std::size_t> group(order.begin() + static_cast<std::ptrdiff_t>(best_lo),
                                 order.begin() + static_cast<std::ptrdiff_t>(best_hi));
  if (group.size() > budget) group.resize(budget);
  return group;
}

}  // namespace

solver::RecoverySolution orthogonal_complement_decode(const DenseMatrix& a, const DenseVector& y,
                                                      const solver::SolveOptions& opts) {
  if (a.rows() != y.size()) throw DimensionMismatch("orthogonal_complement_decode: A.rows != y.dim");
  if (a.cols() >= a.rows()) throw std::invalid_argument("orthogonal_complement_decode: requires n < m");
  numerics::require_finite(a, "orthogonal_complement_decode(A)");
  numerics::require_finite(y, "orthogonal_complement_decode(y)");
  if (!numerics::qr_factorize(a).full_column_rank()) {
    throw RankDeficient("orthogonal_complement_decode: A is rank deficient");
  }

  const DenseMatrix b = numerics::orthogonal_complement_basis(a).transpose();
  const DenseVector c = b * y;
  const solver::BasisPursuitSolution bp = solver::solve_basis_pursuit(b, c, opts);

  solver::RecoverySolution sol;
  sol.e_hat = bp.e;
  sol.x_hat = numerics::least_squares_min_norm(a, y - sol.e_hat);
  sol.status = bp.status;
  sol.iterations = bp.iterations;
  sol.duality_gap = bp.duality_gap;
  sol.objective = sol.x_hat.lpNorm<1>() + sol.e_hat.lpNorm<1>();
  sol.primal_residual = (a * sol.x_hat + sol.e_hat - y).norm();
  return sol;
}

std::string_view to_string(GreedyVariant v) {
  return v == GreedyVariant::OMP ? "OMP" : "ROMP";
}

void GreedyOptions::validate(std::size_t m, std::size_t n) const {
  if (max_atoms > m + n) throw std::invalid_argument("GreedyOptions: max_atoms exceeds m + n");
  if (!(residual_tolerance > 0.0)) throw std::invalid_argument("GreedyOptions: residual_tolerance must be > 0");
}

std::size_t default_max_atoms(GreedyVariant v, std::size_t k1, std::size_t k2, std::size_t m, std::size_t n) {
  const std::size_t s = std::max<std::size_t>(k1 + k2, 1);
  return std::min(v == GreedyVariant::ROMP ? 2 * s : s, m + n);
}

GreedySolution greedy_decode(const DenseMatrix& a, const DenseVector& y, const GreedyOptions& opts) {
  if (a.rows() != y.size()) throw DimensionMismatch("greedy_decode: A.rows != y.dim");
  numerics::require_finite(a, "greedy_decode(A)");
  numerics::require_finite(y, "greedy_decode(y)");
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  opts.validate(m, n);
  const std::size_t max_atoms = opts.max_atoms == 0 ? std::max<std::size_t>(1, m / 2) : opts.max_atoms;

  DenseVector inv_norm(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    inv_norm(j) = norm > 0.0 ? 1.0 / norm : 0.0;
  }

  GreedySolution out;
  std::vector<bool> blocked(n + m, false);
  OrthoBasis basis(a.rows());
  const double stop = opts.residual_tolerance * y.norm();
  DenseVector r = y;
  out.residual_norms.push_back(r.norm());

  while (out.atoms.size() < max_atoms && out.residual_norms.back() > stop &&
         static_cast<std::size_t>(basis.size()) < m) {
    DenseVector corr(static_cast<Eigen::Index>(n + m));
    corr.head(a.cols()) = (a.transpose() * r).cwiseProduct(inv_norm).cwiseAbs();
    corr.tail(a.rows()) = r.cwiseAbs();

    const std::vector<std::size_t> picks =
        select_round(corr, blocked, opts.variant, max_atoms, max_atoms - out.atoms.size());
    if (picks.empty()) break;
    bool grew = false;
    for (std::size_t j : picks) {
      blocked[j] = true;
      if (basis.push(atom(a, j))) {
        out.atoms.push_back(j);
        grew = true;
      }
    }
    const DenseVector next = basis.residual(y);
    const double next_norm = next.norm();
    if (!grew || !(next_norm < out.residual_norms.back())) break;
    r = next;
    out.residual_norms.push_back(next_norm);
  }

  solver::RecoverySolution& sol = out.solution;
  sol.x_hat = DenseVector::Zero(a.cols());
  sol.e_hat = DenseVector::Zero(a.rows());
  if (!out.atoms.empty()) {
    DenseMatrix d(a.rows(), static_cast<Eigen::Index>(out.atoms.size()));
    for (std::size_t t = 0; t < out.atoms.size(); ++t) d.col(static_cast<Eigen::Index>(t)) = atom(a, out.atoms[t]);
    const DenseVector coef = numerics::least_squares_min_norm(d, y);
    for (std::size_t t = 0; t < out.atoms.size(); ++t) {
      const std::size_t j = out.atoms[t];
      if (j < n) {
        sol.x_hat(static_cast<Eigen::Index>(j)) = coef(static_cast<Eigen::Index>(t));
      } else {
        sol.e_hat(static_cast<Eigen::Index>(j - n)) = coef(static_cast<Eigen::Index>(t));
      }
    }
  }
  sol.status = solver::SolveStatus::Optimal;
  sol.iterations = out.residual_norms.size() - 1;
  sol.objective = sol.x_hat.lpNorm<1>() + sol.e_hat.lpNorm<1>();
  sol.primal_residual = (a * sol.x_hat + sol.e_hat - y).norm();
  return out;
}

}  // namespace cab::baselines
