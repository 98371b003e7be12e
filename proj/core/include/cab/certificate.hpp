#pragma once

// l1-recoverability certificates for the cross-and-bouquet model.
//
// For a sign/support triple (I, J, sigma) the program is recoverable iff some
// q with ||q||_inf < 1 satisfies G^T q = w, where
//
//   G = [ A(J^c, :) ]        w = A(J, :)^T sigma - 1_I.
//       [ E(I^c, :) ]
//
// E(I^c, :) selects the coordinates outside I, so G is p x n with
// p = m + n - k1 - k2. Columns keep A's natural order so that w indexes
// directly. The exact check solves min ||q||_inf s.t. G^T q = w as an LP; the
// constructive route starts from the minimum-norm q0 and iterates
//
//   q <- q - theta(q) + P_range(G) theta(q),
//
// where theta keeps the part of each entry protruding above 1 - eps.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "cab/model.hpp"
#include "cab/numerics.hpp"

namespace cab::certificate {

inline constexpr double kDefaultEps = 0.05;
inline constexpr double kDefaultStrictnessSlack = 1e-6;

struct SeparatorProblem {
  DenseMatrix g;
  DenseVector w;
  double eps = kDefaultEps;
  /// Thin QR of g; basis.q spans range(g).
  numerics::QrFactorization basis;

  Eigen::Index p() const { return g.rows(); }
  Eigen::Index n() const { return g.cols(); }
};

/// Throws std::invalid_argument for inconsistent patterns or p <= 0 and
/// RankDeficient when G lacks full column rank.
SeparatorProblem build_separator_problem(const DenseMatrix& a, const model::SupportPattern& pattern,
                                         double eps = kDefaultEps);

/// Minimum l2-norm solution of G^T q = w: q0 = Q R^-T w.
DenseVector initial_separator(const SeparatorProblem& prob);

/// Elementwise: 0 where |q_i| <= 1 - eps, else sgn(q_i)(|q_i| - 1 + eps).
DenseVector theta(const DenseVector& q, double eps);

/// Number of entries with |q_i| > 1 - eps.
std::size_t count_violations(const DenseVector& q, double eps);

struct Certificate {
  DenseVector q;
  bool converged = false;
  bool stalled = false;
  std::size_t iterations = 0;
  std::vector<std::size_t> violation_counts;  // per iterate q_0, q_1, ...
  std::vector<std::size_t> invalid_counts;    // entries with |q_i| >= 1 per iterate
  std::vector<double> theta_norms;            // ||theta q_k||_2 per iterate
  std::vector<double> inf_norms;              // ||q_k||_inf per iterate
  double q_inf_norm = 0.0;
  double constraint_residual = 0.0;  // max_k ||G^T q_k - w||_2
};

struct RefineOptions {
  std::size_t max_iter = 500;
  double strictness_slack = kDefaultStrictnessSlack;
  /// Stop as stalled when ||theta q|| fails to shrink by this relative
  /// amount for stall_window consecutive iterations.
  double stall_relative_decrease = 1e-6;
  std::size_t stall_window = 5;
};

using IterateObserver = std::function<void(std::size_t iteration, const DenseVector& q)>;

/// Runs the refinement from q0 = initial_separator(prob). Converged means
/// ||q_k||_inf < 1 - strictness_slack.
Certificate refine_separator(const SeparatorProblem& prob, const RefineOptions& opts = {},
                             const IterateObserver& observer = {});

struct ExactVerdict {
  bool recoverable = false;
  /// |t* - 1| <= slack: the float verdict is not trustworthy either way.
  bool marginal = false;
  double min_inf_norm = 0.0;  // t* = min ||q||_inf s.t. G^T q = w
  std::size_t lp_iterations = 0;
  bool lp_optimal = false;
};

/// Solves min t s.t. G^T q = w, -t <= q_i <= t. recoverable iff t* < 1 - slack.
ExactVerdict verify_recoverability_exact(const SeparatorProblem& prob,
                                         double strictness_slack = kDefaultStrictnessSlack);

enum class XiMethod { Auto, ExhaustiveSmall, RandomizedSampling };

struct ProjectionRatioEstimate {
  double c = 0.0;
  std::size_t k = 0;
  double xi_hat = 0.0;
  XiMethod method = XiMethod::Auto;
  std::size_t trials = 0;  // supports evaluated
  /// True for RandomizedSampling that did not cover every support: xi_hat
  /// is then only a lower bound on the supremum.
  bool lower_bound = false;
};

inline constexpr std::uint64_t kExhaustiveSupportLimit = 1'000'000;

/// Estimates xi = sup over k-sparse s of ||P_range(G) s|| / ||s||,
/// k = max(1, floor(c p)). Per support S the value is sigma_max(Q(S, :)).
/// Auto picks ExhaustiveSmall when C(p, k) <= 1e6. Randomized sampling draws
/// distinct supports; with trials >= C(p, k) it covers every support.
ProjectionRatioEstimate estimate_projection_ratio(const DenseMatrix& g, double c, std::size_t trials,
                                                  std::uint64_t seed, XiMethod method = XiMethod::Auto);
ProjectionRatioEstimate estimate_projection_ratio_from_basis(const DenseMatrix& q, double c,
                                                             std::size_t trials, std::uint64_t seed,
                                                             XiMethod method = XiMethod::Auto);

struct Lemma2Check {
  bool holds = false;
  double lhs = 0.0;  // ||q0|| + ||theta q0|| / (1 - xi)
  double rhs = 0.0;  // (1 - eps) sqrt(c p)
};

/// Sufficient condition for the refinement to converge. Throws
/// std::domain_error when xi_hat >= 1.
Lemma2Check check_lemma2_conditions(const DenseVector& q0, double xi_hat, double eps, double c,
                                    std::size_t p);

struct DiagnosticsOptions {
  double xi_c = 0.02;
  std::size_t xi_trials = 200;
  std::uint64_t seed = 0;
};

struct Diagnostics {
  double q0_norm = 0.0;
  double theta_q0_norm = 0.0;
  double q0_norm_over_sqrt_m = 0.0;
  double theta_q0_norm_over_sqrt_m = 0.0;
  double q0_inf_norm = 0.0;
  std::size_t initial_violations = 0;
  double mu_jc_norm_sq = 0.0;  // ||mu restricted to J^c||_2^2
  ProjectionRatioEstimate xi;
};

Diagnostics measure_diagnostics(const model::ProblemInstance& inst, const SeparatorProblem& prob,
                                const DiagnosticsOptions& opts = {});

}  // namespace cab::certificate
