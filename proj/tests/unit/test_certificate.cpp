#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "cab/certificate.hpp"
#include "cab/combinatorics.hpp"
#include "cab/model.hpp"
#include "cab/numerics.hpp"
#include "cab/rng.hpp"
#include "cab/solver.hpp"
#include "oracles.hpp"

using cab::DenseMatrix;
using cab::DenseVector;
namespace ct = cab::certificate;
namespace md = cab::model;

namespace {

md::ModelParams params(std::size_t m, std::size_t n, double nu, std::size_t k1, double rho,
                       std::uint64_t seed) {
  md::ModelParams p;
  p.m = m;
  p.n = n;
  p.nu = nu;
  p.k1 = k1;
  p.rho = rho;
  p.seed = seed;
  return p;
}

ct::SeparatorProblem direct_problem(const DenseMatrix& g, const DenseVector& w, double eps = 0.05) {
  ct::SeparatorProblem prob;
  prob.g = g;
  prob.w = w;
  prob.eps = eps;
  prob.basis = cab::numerics::qr_factorize(g);
  return prob;
}

// Exhaustive xi straight from the definition: the top singular value of
// Q(S, :) over every size-k row subset S.
double brute_force_xi(const DenseMatrix& q, std::size_t k) {
  const auto p = static_cast<std::size_t>(q.rows());
  std::vector<bool> pick(p, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  double best = 0.0;
  do {
    DenseMatrix sub(static_cast<Eigen::Index>(k), q.cols());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (pick[i]) sub.row(r++) = q.row(static_cast<Eigen::Index>(i));
    }
    best = std::max(best, Eigen::JacobiSVD<DenseMatrix>(sub).singularValues()(0));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST(Separator, BlockLayoutSmall) {
  cab::testing::Gen g(1);
  const DenseMatrix a = g.matrix(3, 2);
  md::SupportPattern pat;
  pat.signal_support = {0};
  pat.error_support = {1};
  pat.error_signs = {-1};
  const auto prob = ct::build_separator_problem(a, pat);
  ASSERT_EQ(prob.g.rows(), 3);
  ASSERT_EQ(prob.g.cols(), 2);
  EXPECT_EQ(prob.g.row(0), a.row(0));
  EXPECT_EQ(prob.g.row(1), a.row(2));
  EXPECT_EQ(prob.g(2, 0), 0.0);
  EXPECT_EQ(prob.g(2, 1), 1.0);
  EXPECT_NEAR(prob.w(0), -a(1, 0) - 1.0, 1e-15);
  EXPECT_NEAR(prob.w(1), -a(1, 1), 1e-15);
}

TEST(Separator, EmptyErrorSupportGivesNegatedIndicator) {
  const auto inst = md::synthesize(params(20, 8, 0.1, 3, 0.0, 2));
  const auto prob = ct::build_separator_problem(inst.a, inst.pattern);
  DenseVector expect = DenseVector::Zero(8);
  for (std::size_t i : inst.pattern.signal_support) expect(static_cast<Eigen::Index>(i)) = -1.0;
  EXPECT_EQ(prob.w, expect);
  EXPECT_EQ(prob.p(), 20 + 8 - 3);
}

TEST(Separator, InitialSeparatorSatisfiesConstraint) {
  const auto inst = md::synthesize(params(40, 16, 0.1, 2, 0.5, 3));
  const auto prob = ct::build_separator_problem(inst.a, inst.pattern);
  const DenseVector q0 = ct::initial_separator(prob);
  EXPECT_LE((prob.g.transpose() * q0 - prob.w).norm(), 1e-9 * (1 + prob.w.norm()));
}

TEST(Separator, InitialSeparatorIsMinimumNorm) {
  cab::testing::Gen g(4);
  const DenseMatrix gm = g.matrix(50, 10);
  const DenseVector w = gm.transpose() * g.vector(50);
  const auto prob = direct_problem(gm, w);
  const DenseVector q0 = ct::initial_separator(prob);
  EXPECT_LE((gm.transpose() * q0 - w).norm(), 1e-9 * w.norm());
  const DenseVector ref = gm * (gm.transpose() * gm).ldlt().solve(w);
  EXPECT_LE((q0 - ref).norm(), 1e-9 * ref.norm());
}

TEST(Separator, TrivialExamples) {
  DenseVector w(3);
  w << 0.3, -2, 1;
  EXPECT_LE((ct::initial_separator(direct_problem(DenseMatrix::Identity(3, 3), w)) - w).norm(), 1e-14);
  DenseMatrix g(2, 1);
  g << 2, 0;
  DenseVector w1(1);
  w1 << 4;
  const DenseVector q0 = ct::initial_separator(direct_problem(g, w1));
  EXPECT_NEAR(q0(0), 2.0, 1e-14);
  EXPECT_NEAR(q0(1), 0.0, 1e-14);
}

TEST(Separator, Errors) {
  cab::testing::Gen g(5);
  const DenseMatrix a = g.matrix(6, 3);
  md::SupportPattern pat;
  pat.signal_support = {0};
  pat.error_support = {0, 1};
  pat.error_signs = {1};
  EXPECT_THROW(ct::build_separator_problem(a, pat), std::invalid_argument);
  pat.error_signs = {1, -1};
  EXPECT_THROW(ct::build_separator_problem(a, pat, 0.0), std::invalid_argument);
  EXPECT_THROW(ct::build_separator_problem(a, pat, 1.0), std::invalid_argument);
  pat.signal_support = {2, 1};
  EXPECT_THROW(ct::build_separator_problem(a, pat), std::invalid_argument);
  pat.signal_support = {0, 1, 2};
  pat.error_support = {0, 1, 2, 3, 4, 5};
  pat.error_signs.assign(6, 1);
  EXPECT_THROW(ct::build_separator_problem(a, pat), std::invalid_argument);
  pat.error_support = {0, 1, 2, 3, 4};
  pat.error_signs.assign(5, 1);
  EXPECT_THROW(ct::build_separator_problem(a, pat), cab::RankDeficient);
  DenseMatrix dup = a;
  dup.col(1) = dup.col(0);
  pat.signal_support = {0, 1};
  pat.error_support = {};
  pat.error_signs = {};
  EXPECT_THROW(ct::build_separator_problem(dup, pat), cab::RankDeficient);
}

TEST(Theta, Examples) {
  DenseVector q(2);
  q << 0.5, -0.3;
  EXPECT_EQ(ct::theta(q, 0.1), DenseVector::Zero(2));
  DenseVector q1(1);
  q1 << 1.2;
  EXPECT_NEAR(ct::theta(q1, 0.1)(0), 0.3, 1e-15);
  DenseVector q2(1);
  q2 << -1.0;
  EXPECT_NEAR(ct::theta(q2, 0.05)(0), -0.05, 1e-15);
  EXPECT_THROW(ct::theta(q2, 0.0), std::invalid_argument);
}

TEST(Theta, AlgebraProperty) {
  cab::testing::Gen g(6);
  for (int t = 0; t < 2000; ++t) {
    const double eps = g.uniform(0.001, 0.999);
    const DenseVector q = g.vector(static_cast<Eigen::Index>(g.index(1, 30))) * g.uniform(0.1, 3.0);
    const DenseVector th = ct::theta(q, eps);
    const bool zero = th.isZero(0.0);
    EXPECT_EQ(zero, q.cwiseAbs().maxCoeff() <= 1.0 - eps);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      EXPECT_TRUE(th(i) == 0.0 || (th(i) > 0) == (q(i) > 0));
      EXPECT_LE(std::abs(q(i) - th(i)), 1.0 - eps + 1e-15);
    }
    EXPECT_LE(th.norm(), q.norm());
    EXPECT_EQ(ct::count_violations(q, eps), static_cast<std::size_t>((th.array() != 0.0).count()));
  }
}

TEST(Refine, AlreadyValidConvergesImmediately) {
  DenseMatrix g(2, 1);
  g << 2, 0;
  DenseVector w(1);
  w << 1;
  const auto cert = ct::refine_separator(direct_problem(g, w));
  EXPECT_TRUE(cert.converged);
  EXPECT_EQ(cert.iterations, 0u);
  EXPECT_NEAR(cert.q(0), 0.5, 1e-15);
  EXPECT_EQ(cert.violation_counts, std::vector<std::size_t>{0});
}

TEST(Refine, ConstraintPreservationProperty) {
  cab::testing::Gen g(7);
  for (int t = 0; t < 30; ++t) {
    const auto inst = md::synthesize(params(g.index(30, 120), 12, g.uniform(0.05, 0.4), 2, g.uniform(0.1, 0.7), g.seed()));
    const auto prob = ct::build_separator_problem(inst.a, inst.pattern);
    const double bound = 1e-8 * (1 + prob.w.norm());
    std::size_t seen = 0;
    ct::RefineOptions opts;
    opts.max_iter = 40;
    const auto cert = ct::refine_separator(prob, opts, [&](std::size_t, const DenseVector& q) {
      ++seen;
      EXPECT_LE((prob.g.transpose() * q - prob.w).norm(), bound);
    });
    EXPECT_EQ(seen, cert.iterations + 1);
    EXPECT_LE(cert.constraint_residual, bound);
    EXPECT_EQ(cert.theta_norms.size(), cert.iterations + 1);
    EXPECT_EQ(cert.violation_counts.size(), cert.iterations + 1);
    EXPECT_EQ(cert.invalid_counts.size(), cert.iterations + 1);
  }
}

TEST(Refine, SoundnessProperty) {
  cab::testing::Gen g(8);
  int converged = 0;
  for (int t = 0; t < 150; ++t) {
    const auto inst = md::synthesize(params(g.index(20, 60), 10, g.uniform(0.05, 0.3), 2, g.uniform(0.05, 0.6), g.seed()));
    ct::SeparatorProblem prob;
    try {
      prob = ct::build_separator_problem(inst.a, inst.pattern);
    } catch (const cab::RankDeficient&) {
      continue;
    }
    const auto cert = ct::refine_separator(prob);
    if (!cert.converged) continue;
    ++converged;
    EXPECT_TRUE(ct::verify_recoverability_exact(prob).recoverable) << "trial " << t;
    EXPECT_LT(cert.q.cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_GT(converged, 30);
}

TEST(Refine, LargerEpsMeansMoreViolations) {
  const auto inst = md::synthesize(params(300, 120, 0.1, 5, 0.5, 9));
  const auto lo = ct::build_separator_problem(inst.a, inst.pattern, 0.05);
  const auto hi = ct::build_separator_problem(inst.a, inst.pattern, 0.5);
  const DenseVector q0 = ct::initial_separator(lo);
  EXPECT_GT(ct::count_violations(q0, 0.5), ct::count_violations(q0, 0.05));
  EXPECT_EQ(ct::refine_separator(hi).violation_counts.front(), ct::count_violations(q0, 0.5));
}

TEST(Refine, RejectsZeroIterationBudget) {
  ct::RefineOptions opts;
  opts.max_iter = 0;
  EXPECT_THROW(ct::refine_separator(direct_problem(DenseMatrix::Identity(2, 2), DenseVector::Ones(2)), opts),
               std::invalid_argument);
}

TEST(Exact, ZeroTarget) {
  cab::testing::Gen g(10);
  const auto v = ct::verify_recoverability_exact(direct_problem(g.matrix(6, 2), DenseVector::Zero(2)));
  EXPECT_TRUE(v.recoverable);
  EXPECT_EQ(v.min_inf_norm, 0.0);
}

TEST(Exact, TwoByOneExample) {
  DenseMatrix a(2, 1);
  a << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  md::SupportPattern pat;
  pat.signal_support = {0};
  const auto prob = ct::build_separator_problem(a, pat);
  const auto v = ct::verify_recoverability_exact(prob);
  EXPECT_TRUE(v.recoverable);
  EXPECT_TRUE(v.lp_optimal);
  EXPECT_NEAR(v.min_inf_norm, 1 / std::sqrt(2.0), 1e-8);
}

TEST(Exact, MatchesHandLp) {
  // min ||q||_inf s.t. q1 + 2 q2 = 3 is attained at q = (1, 1).
  DenseMatrix g(2, 1);
  g << 1, 2;
  DenseVector w(1);
  w << 3;
  const auto v = ct::verify_recoverability_exact(direct_problem(g, w));
  EXPECT_NEAR(v.min_inf_norm, 1.0, 1e-8);
  EXPECT_FALSE(v.recoverable);
  EXPECT_TRUE(v.marginal);
  w << 1.5;
  const auto v2 = ct::verify_recoverability_exact(direct_problem(g, w));
  EXPECT_NEAR(v2.min_inf_norm, 0.5, 1e-8);
  EXPECT_TRUE(v2.recoverable);
  EXPECT_FALSE(v2.marginal);
}

TEST(Exact, CrossValidatesAgainstDecoder) {
  int agree = 0;
  int total = 0;
  for (int r = 1; r <= 7; ++r) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto p = params(30, 12, 0.1, 2, 0.1 * r, cab::derive_seed(404, static_cast<std::uint64_t>(r), s));
      md::SynthesisOptions so;
      so.randomize_magnitudes = true;
      const auto inst = md::synthesize(p, so);
      bool recoverable = false;
      try {
        recoverable = ct::verify_recoverability_exact(ct::build_separator_problem(inst.a, inst.pattern)).recoverable;
      } catch (const cab::RankDeficient&) {
      }
      const bool decoded =
          cab::solver::judge_success(cab::solver::solve_extended_l1(inst.a, inst.y), inst, 0.01);
      agree += recoverable == decoded ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(agree, static_cast<int>(std::ceil(0.98 * total))) << agree << "/" << total;
}

TEST(Exact, MonotoneInErrorSubset) {
  cab::testing::Gen g(11);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const auto inst = md::synthesize(params(30, 12, 0.1, 2, 0.3, g.seed()));
    const auto full = ct::verify_recoverability_exact(ct::build_separator_problem(inst.a, inst.pattern));
    if (!full.recoverable) continue;
    for (int sub = 0; sub < 5; ++sub) {
      md::SupportPattern smaller = inst.pattern;
      smaller.error_support.clear();
      smaller.error_signs.clear();
      for (std::size_t k = 0; k < inst.pattern.error_support.size(); ++k) {
        if (g.uniform() < 0.5) {
          smaller.error_support.push_back(inst.pattern.error_support[k]);
          smaller.error_signs.push_back(inst.pattern.error_signs[k]);
        }
      }
      EXPECT_TRUE(ct::verify_recoverability_exact(ct::build_separator_problem(inst.a, smaller)).recoverable);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Xi, SquareInvertibleIsOne) {
  cab::testing::Gen g(12);
  for (double c : {0.1, 0.5, 0.9}) {
    const auto est = ct::estimate_projection_ratio(g.matrix(6, 6), c, 10, 1);
    EXPECT_NEAR(est.xi_hat, 1.0, 1e-12);
    EXPECT_EQ(est.method, ct::XiMethod::ExhaustiveSmall);
    EXPECT_FALSE(est.lower_bound);
  }
}

TEST(Xi, DiagonalLine) {
  DenseMatrix g(2, 1);
  g << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto est = ct::estimate_projection_ratio(g, 0.5, 10, 1);
  EXPECT_EQ(est.k, 1u);
  EXPECT_NEAR(est.xi_hat, 1 / std::sqrt(2.0), 1e-12);
}

TEST(Xi, ExhaustiveMatchesDefinition) {
  cab::testing::Gen g(13);
  for (int t = 0; t < 10; ++t) {
    const auto p = static_cast<Eigen::Index>(g.index(4, 12));
    const DenseMatrix q = cab::numerics::qr_factorize(g.matrix(p, static_cast<Eigen::Index>(g.index(1, 3)))).q;
    const double c = g.uniform(0.05, 0.5);
    const auto est = ct::estimate_projection_ratio_from_basis(q, c, 1, 0, ct::XiMethod::ExhaustiveSmall);
    EXPECT_NEAR(est.xi_hat, brute_force_xi(q, est.k), 1e-12);
  }
}

TEST(Xi, SampledCoveringAllSupportsEqualsExhaustive) {
  cab::testing::Gen g(14);
  for (Eigen::Index p = 3; p <= 14; ++p) {
    const DenseMatrix gm = g.matrix(p, 2);
    const double c = 2.5 / static_cast<double>(p);
    const auto ex = ct::estimate_projection_ratio(gm, c, 1, 0, ct::XiMethod::ExhaustiveSmall);
    ASSERT_EQ(ex.k, 2u);
    const auto count = static_cast<std::size_t>(cab::binomial(static_cast<std::uint64_t>(p), 2));
    const auto rs = ct::estimate_projection_ratio(gm, c, count, g.seed(), ct::XiMethod::RandomizedSampling);
    EXPECT_NEAR(rs.xi_hat, ex.xi_hat, 1e-10) << "p=" << p;
    EXPECT_FALSE(rs.lower_bound);
  }
}

TEST(Xi, SampledIsLowerBoundProperty) {
  cab::testing::Gen g(15);
  for (int t = 0; t < 40; ++t) {
    const auto p = static_cast<Eigen::Index>(g.index(5, 18));
    const DenseMatrix gm = g.matrix(p, static_cast<Eigen::Index>(g.index(1, static_cast<std::size_t>(p) - 1)));
    const double c = g.uniform(0.1, 0.4);
    const auto ex = ct::estimate_projection_ratio(gm, c, 1, 0, ct::XiMethod::ExhaustiveSmall);
    const auto rs = ct::estimate_projection_ratio(gm, c, g.index(1, 20), g.seed(), ct::XiMethod::RandomizedSampling);
    EXPECT_LE(rs.xi_hat, ex.xi_hat + 1e-12);
    for (double v : {rs.xi_hat, ex.xi_hat}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
  }
}

TEST(Xi, Errors) {
  EXPECT_THROW(ct::estimate_projection_ratio(DenseMatrix::Identity(3, 3), 0.0, 1, 0), std::invalid_argument);
  EXPECT_THROW(ct::estimate_projection_ratio(DenseMatrix::Identity(3, 3), 1.0, 1, 0), std::invalid_argument);
  EXPECT_THROW(ct::estimate_projection_ratio(DenseMatrix::Identity(3, 3), 0.5, 0, 0, ct::XiMethod::RandomizedSampling),
               std::invalid_argument);
}

TEST(Lemma2, Examples) {
  const auto trivial = ct::check_lemma2_conditions(DenseVector::Zero(4), 0.3, 0.05, 0.5, 4);
  EXPECT_TRUE(trivial.holds);
  EXPECT_EQ(trivial.lhs, 0.0);
  // ||q0|| = 3 and ||theta q0|| = 1 at eps = 0.1: one entry at 1.9, eight
  // entries below 0.9 carrying the remaining 9 - 3.61.
  DenseVector q0 = DenseVector::Constant(9, std::sqrt((9.0 - 1.9 * 1.9) / 8.0));
  q0(0) = 1.9;
  ASSERT_LT(q0(1), 0.9);
  const auto chk = ct::check_lemma2_conditions(q0, 0.5, 0.1, 0.5, 200);
  EXPECT_NEAR(chk.lhs, 5.0, 1e-12);
  EXPECT_NEAR(chk.rhs, 9.0, 1e-12);
  EXPECT_TRUE(chk.holds);
  EXPECT_THROW(ct::check_lemma2_conditions(q0, 1.0, 0.1, 0.5, 200), std::domain_error);
}

TEST(Lemma2, HoldingConditionImpliesConvergence) {
  // One spiky column: xi for k-sparse supports is the norm of its k largest
  // entries, and a single large coordinate of q0 drives the violation.
  const Eigen::Index p = 100;
  DenseVector g = DenseVector::Ones(p);
  g(0) = 5.0;
  g.normalize();
  const double c = 0.5;
  const std::size_t k = 50;
  DenseVector sorted = g.cwiseAbs();
  std::sort(sorted.data(), sorted.data() + p, std::greater<>());
  const double xi = sorted.head(static_cast<Eigen::Index>(k)).norm();
  const auto est = ct::estimate_projection_ratio(g, c, 2000, 3);
  EXPECT_LE(est.xi_hat, xi + 1e-12);

  DenseVector w(1);
  w << 1.2 / g(0);
  const auto prob = direct_problem(g, w);
  const DenseVector q0 = ct::initial_separator(prob);
  ASSERT_GT(ct::count_violations(q0, prob.eps), 0u);
  const auto chk = ct::check_lemma2_conditions(q0, xi, prob.eps, c, static_cast<std::size_t>(p));
  ASSERT_TRUE(chk.holds) << chk.lhs << " vs " << chk.rhs;
  const auto cert = ct::refine_separator(prob);
  EXPECT_TRUE(cert.converged);
  EXPECT_LE(cert.iterations, 20u);
  for (std::size_t i = 1; i < cert.theta_norms.size(); ++i) {
    EXPECT_LE(cert.theta_norms[i], xi * cert.theta_norms[i - 1] + 1e-15);
  }
}

TEST(Diagnostics, MeanMassOutsideErrors) {
  const auto clean = md::synthesize(params(60, 15, 0.1, 2, 0.0, 1));
  const auto d0 = ct::measure_diagnostics(clean, ct::build_separator_problem(clean.a, clean.pattern));
  EXPECT_NEAR(d0.mu_jc_norm_sq, 1.0, 1e-12);
  const auto dirty = md::synthesize(params(60, 15, 0.1, 2, 0.35, 1));
  const auto d1 = ct::measure_diagnostics(dirty, ct::build_separator_problem(dirty.a, dirty.pattern));
  EXPECT_NEAR(d1.mu_jc_norm_sq, (60.0 - 21.0) / 60.0, 1e-12);
  EXPECT_NEAR(d1.q0_norm_over_sqrt_m * std::sqrt(60.0), d1.q0_norm, 1e-12);
  EXPECT_GE(d1.xi.xi_hat, 0.0);
  EXPECT_LE(d1.xi.xi_hat, 1.0);
}

namespace {

double median_q0_ratio(std::size_t m, double nu, std::size_t k1, double rho) {
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = md::synthesize(params(m, m / 4, nu, k1, rho, cab::derive_seed(55, s)));
    const auto prob = ct::build_separator_problem(inst.a, inst.pattern);
    v.push_back(ct::initial_separator(prob).norm() / std::sqrt(static_cast<double>(m)));
  }
  std::nth_element(v.begin(), v.begin() + 10, v.end());
  return v[10];
}

}  // namespace

// ||q0|| is bounded by a nu sqrt(m) term plus a lower-order term that grows
// like 1/nu. The nu-proportional part only dominates once nu >> m^(-1/4).
TEST(Diagnostics, SeparatorNormShrinksWithNuWhereProportionalTermDominates) {
  EXPECT_LT(median_q0_ratio(400, 1.2, 1, 0.1), median_q0_ratio(400, 2.4, 1, 0.1));
}

TEST(Diagnostics, SeparatorNormIsSublinearInSqrtM) {
  for (double nu : {0.05, 0.1}) {
    const double r200 = median_q0_ratio(200, nu, 1, 0.1);
    const double r800 = median_q0_ratio(800, nu, 1, 0.1);
    EXPECT_LT(r800, r200) << "nu=" << nu;
  }
}
