#include "cab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "cab/combinatorics.hpp"
#include "cab/lp.hpp"
#include "cab/rng.hpp"

namespace cab::certificate {

namespace {

void check_index_set(const std::vector<std::size_t>& idx, std::size_t bound, const char* what) {
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] >= bound || (t > 0 && idx[t] <= idx[t - 1])) {
      throw std::invalid_argument(std::string("build_separator_problem: ") + what +
                                  " must be strictly increasing and in range");
    }
  }
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted, std::size_t bound) {
  std::vector<std::size_t> out;
  out.reserve(bound - sorted.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < bound; ++i) {
    if (t < sorted.size() && sorted[t] == i) {
      ++t;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// sigma_max of the rows `support` of an orthonormal basis: the largest
// fraction of a vector supported on those rows that survives projection.
double support_ratio(const DenseMatrix& q, const std::vector<std::size_t>& support) {
  const auto k = static_cast<Eigen::Index>(support.size());
  DenseMatrix rows(k, q.cols());
  for (Eigen::Index i = 0; i < k; ++i) rows.row(i) = q.row(static_cast<Eigen::Index>(support[i]));
  double top = 0.0;
  if (k == 1) {
    top = rows.row(0).squaredNorm();
  } else {
    const DenseMatrix gram = rows * rows.transpose();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
    top = es.eigenvalues().maxCoeff();
  }
  return std::sqrt(std::clamp(top, 0.0, 1.0));
}

// Advances a lexicographic k-combination of [n]; false after the last one.
bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SeparatorProblem build_separator_problem(const DenseMatrix& a, const model::SupportPattern& pattern,
                                         double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_separator_problem: eps must lie in (0, 1)");
  numerics::require_finite(a, "build_separator_problem");
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  const auto& sig = pattern.signal_support;
  const auto& err = pattern.error_support;
  check_index_set(sig, n, "I");
  check_index_set(err, m, "J");
  if (pattern.error_signs.size() != err.size()) {
    throw std::invalid_argument("build_separator_problem: |sigma| != |J|");
  }
  const std::size_t k1 = sig.size();
  const std::size_t k2 = err.size();
  if (k1 + k2 >= m + n) throw std::invalid_argument("build_separator_problem: degenerate p <= 0");
  const std::size_t p = m + n - k1 - k2;
  if (m - k2 < k1) {
    throw RankDeficient("build_separator_problem: fewer clean rows than signal atoms; G is rank deficient");
  }

  const std::vector<std::size_t> clean_rows = complement(err, m);
  const std::vector<std::size_t> off_support = complement(sig, n);

  SeparatorProblem prob;
  prob.eps = eps;
  prob.g = DenseMatrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  Eigen::Index row = 0;
  for (std::size_t r : clean_rows) prob.g.row(row++) = a.row(static_cast<Eigen::Index>(r));
  for (std::size_t c : off_support) prob.g(row++, static_cast<Eigen::Index>(c)) = 1.0;

  prob.w = DenseVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < k2; ++t) {
    prob.w += static_cast<double>(pattern.error_signs[t]) * a.row(static_cast<Eigen::Index>(err[t])).transpose();
  }
  for (std::size_t i : sig) prob.w(static_cast<Eigen::Index>(i)) -= 1.0;

  prob.basis = numerics::qr_factorize(prob.g);
  if (!prob.basis.full_column_rank()) {
    throw RankDeficient("build_separator_problem: G does not have full column rank");
  }
  return prob;
}

DenseVector initial_separator(const SeparatorProblem& prob) {
  if (!prob.basis.full_column_rank()) throw RankDeficient("initial_separator: G is rank deficient");
  const DenseVector u = prob.basis.r.transpose().triangularView<Eigen::Lower>().solve(prob.w);
  return prob.basis.q * u;
}

DenseVector theta(const DenseVector& q, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("theta: eps must lie in (0, 1)");
  const double level = 1.0 - eps;
  DenseVector out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double mag = std::abs(q(i));
    out(i) = mag <= level ? 0.0 : std::copysign(mag - level, q(i));
  }
  return out;
}

std::size_t count_violations(const DenseVector& q, double eps) {
  const double level = 1.0 - eps;
  return static_cast<std::size_t>((q.array().abs() > level).count());
}

Certificate refine_separator(const SeparatorProblem& prob, const RefineOptions& opts,
                             const IterateObserver& observer) {
  if (opts.max_iter < 1) throw std::invalid_argument("refine_separator: max_iter must be >= 1");
  const DenseMatrix& basis = prob.basis.q;
  const double accept = 1.0 - opts.strictness_slack;

  Certificate cert;
  DenseVector q = initial_separator(prob);
  std::size_t slow_steps = 0;
  for (std::size_t k = 0;; ++k) {
    if (observer) observer(k, q);
    const DenseVector th = theta(q, prob.eps);
    const double th_norm = th.norm();
    const double inf_norm = q.size() > 0 ? q.cwiseAbs().maxCoeff() : 0.0;
    cert.violation_counts.push_back(count_violations(q, prob.eps));
    cert.invalid_counts.push_back(static_cast<std::size_t>((q.array().abs() >= 1.0).count()));
    cert.theta_norms.push_back(th_norm);
    cert.inf_norms.push_back(inf_norm);
    cert.constraint_residual =
        std::max(cert.constraint_residual, (prob.g.transpose() * q - prob.w).norm());
    cert.iterations = k;

    if (inf_norm < accept) {
      cert.converged = true;
      break;
    }
    if (k > 0) {
      const double prev = cert.theta_norms[k - 1];
      slow_steps = th_norm > (1.0 - opts.stall_relative_decrease) * prev ? slow_steps + 1 : 0;
      if (slow_steps >= opts.stall_window) {
        cert.stalled = true;
        break;
      }
    }
    if (k >= opts.max_iter) break;

    const DenseVector coeffs = basis.transpose() * th;
    q += basis * coeffs - th;
  }
  cert.q_inf_norm = cert.inf_norms.back();
  cert.q = std::move(q);
  return cert;
}

ExactVerdict verify_recoverability_exact(const SeparatorProblem& prob, double strictness_slack) {
  const Eigen::Index p = prob.p();
  const Eigen::Index n = prob.n();
  ExactVerdict verdict;
  if (prob.w.isZero(0.0)) {
    verdict.recoverable = true;
    verdict.lp_optimal = true;
    return verdict;
  }

  // Variables [q+ (p), q- (p), slack (p), t]:
  //   G^T (q+ - q-)            = w
  //   q+ + q- + slack - t      = 0
  DenseMatrix k = DenseMatrix::Zero(n + p, 3 * p + 1);
  k.block(0, 0, n, p) = prob.g.transpose();
  k.block(0, p, n, p) = -prob.g.transpose();
  k.block(n, 0, p, p).diagonal().setOnes();
  k.block(n, p, p, p).diagonal().setOnes();
  k.block(n, 2 * p, p, p).diagonal().setOnes();
  k.block(n, 3 * p, p, 1).setConstant(-1.0);
  DenseVector b = DenseVector::Zero(n + p);
  b.head(n) = prob.w;
  DenseVector cost = DenseVector::Zero(3 * p + 1);
  cost(3 * p) = 1.0;

  lp::DenseConstraint op(std::move(k));
  lp::LpOptions lo;
  lo.gap_tolerance = 1e-10;
  lo.feasibility_tolerance = 1e-10;
  const lp::LpResult r = lp::solve_standard_form(op, b, cost, lo);
  verdict.lp_iterations = r.iterations;
  verdict.lp_optimal = r.status == lp::LpStatus::Optimal;
  const DenseVector q = r.z.segment(0, p) - r.z.segment(p, p);
  // The recovered q is a certificate in its own right; its inf-norm bounds t*.
  verdict.min_inf_norm = std::min(r.objective, q.cwiseAbs().maxCoeff());
  if (!verdict.lp_optimal && r.status == lp::LpStatus::NumericalFailure) {
    verdict.min_inf_norm = r.objective;
  }
  verdict.recoverable = verdict.lp_optimal && verdict.min_inf_norm < 1.0 - strictness_slack;
  verdict.marginal = std::abs(verdict.min_inf_norm - 1.0) <= strictness_slack;
  return verdict;
}

ProjectionRatioEstimate estimate_projection_ratio_from_basis(const DenseMatrix& q, double c,
                                                             std::size_t trials, std::uint64_t seed,
                                                             XiMethod method) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("estimate_projection_ratio: c must lie in (0, 1)");
  const auto p = static_cast<std::size_t>(q.rows());
  if (p == 0) throw std::invalid_argument("estimate_projection_ratio: empty basis");
  ProjectionRatioEstimate est;
  est.c = c;
  est.k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(c * static_cast<double>(p))));
  const std::uint64_t count = binomial(p, est.k);

  if (method == XiMethod::Auto) {
    method = count <= kExhaustiveSupportLimit ? XiMethod::ExhaustiveSmall : XiMethod::RandomizedSampling;
  }
  if (method == XiMethod::ExhaustiveSmall && count > kExhaustiveSupportLimit) {
    throw std::invalid_argument("estimate_projection_ratio: too many supports for exhaustive search");
  }
  est.method = method;

  if (method == XiMethod::ExhaustiveSmall) {
    std::vector<std::size_t> comb(est.k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    do {
      est.xi_hat = std::max(est.xi_hat, support_ratio(q, comb));
      ++est.trials;
    } while (next_combination(comb, p));
    return est;
  }

  if (trials == 0) throw std::invalid_argument("estimate_projection_ratio: trials must be >= 1");
  CounterRng rng(seed);
  constexpr std::uint64_t kRankable = std::uint64_t{1} << 62;
  if (count < kRankable) {
    // Distinct supports via Floyd's algorithm over colex ranks.
    const std::uint64_t draws = std::min<std::uint64_t>(trials, count);
    std::unordered_set<std::uint64_t> ranks;
    ranks.reserve(static_cast<std::size_t>(draws));
    for (std::uint64_t j = count - draws; j < count; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      if (!ranks.insert(t).second) ranks.insert(j);
    }
    for (std::uint64_t r : ranks) {
      est.xi_hat = std::max(est.xi_hat, support_ratio(q, colex_unrank(r, p, est.k)));
    }
    est.trials = static_cast<std::size_t>(draws);
    est.lower_bound = draws < count;
  } else {
    for (std::size_t t = 0; t < trials; ++t) {
      est.xi_hat = std::max(est.xi_hat, support_ratio(q, rng.subset(p, est.k)));
    }
    est.trials = trials;
    est.lower_bound = true;
  }
  return est;
}

ProjectionRatioEstimate estimate_projection_ratio(const DenseMatrix& g, double c, std::size_t trials,
                                                  std::uint64_t seed, XiMethod method) {
  const numerics::QrFactorization qr = numerics::qr_factorize(g);
  return estimate_projection_ratio_from_basis(qr.q, c, trials, seed, method);
}

Lemma2Check check_lemma2_conditions(const DenseVector& q0, double xi_hat, double eps, double c,
                                    std::size_t p) {
  if (!(xi_hat < 1.0)) {
    throw std::domain_error("check_lemma2_conditions: xi_hat >= 1, condition cannot be verified");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("check_lemma2_conditions: eps must lie in (0, 1)");
  Lemma2Check out;
  out.lhs = q0.norm() + theta(q0, eps).norm() / (1.0 - xi_hat);
  out.rhs = (1.0 - eps) * std::sqrt(c * static_cast<double>(p));
  out.holds = out.lhs <= out.rhs;
  return out;
}

Diagnostics measure_diagnostics(const model::ProblemInstance& inst, const SeparatorProblem& prob,
                                const DiagnosticsOptions& opts) {
  Diagnostics d;
  const DenseVector q0 = initial_separator(prob);
  const double sqrt_m = std::sqrt(static_cast<double>(inst.params.m));
  d.q0_norm = q0.norm();
  d.theta_q0_norm = theta(q0, prob.eps).norm();
  d.q0_norm_over_sqrt_m = d.q0_norm / sqrt_m;
  d.theta_q0_norm_over_sqrt_m = d.theta_q0_norm / sqrt_m;
  d.q0_inf_norm = q0.size() > 0 ? q0.cwiseAbs().maxCoeff() : 0.0;
  d.initial_violations = count_violations(q0, prob.eps);
  double corrupted = 0.0;
  for (std::size_t j : inst.pattern.error_support) {
    corrupted += inst.mu(static_cast<Eigen::Index>(j)) * inst.mu(static_cast<Eigen::Index>(j));
  }
  d.mu_jc_norm_sq = inst.mu.squaredNorm() - corrupted;
  d.xi = estimate_projection_ratio_from_basis(prob.basis.q, opts.xi_c, opts.xi_trials, opts.seed,
                                              XiMethod::RandomizedSampling);
  return d;
}

}  // namespace cab::certificate
