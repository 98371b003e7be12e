#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cab/model.hpp"
#include "cab/rng.hpp"
#include "oracles.hpp"

using cab::DenseMatrix;
using cab::DenseVector;
namespace md = cab::model;

namespace {

md::ModelParams params(std::size_t m, std::size_t n, double nu, std::size_t k1, double rho,
                       std::uint64_t seed = 0) {
  md::ModelParams p;
  p.m = m;
  p.n = n;
  p.nu = nu;
  p.k1 = k1;
  p.rho = rho;
  p.seed = seed;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cab_model_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Mean, FlatExamples) {
  const DenseVector mu4 = md::make_mean(4, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(mu4(i), 0.5);
  const DenseVector mu1 = md::make_mean(1, 1.0);
  ASSERT_EQ(mu1.size(), 1);
  EXPECT_DOUBLE_EQ(mu1(0), 1.0);
  const DenseVector mu100 = md::make_mean(100, 2.0);
  EXPECT_NEAR(mu100.norm(), 1.0, 1e-12);
  EXPECT_LE(mu100.cwiseAbs().maxCoeff(), 0.2);
}

TEST(Mean, PerturbedSatisfiesConstraints) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseVector mu = md::make_perturbed_mean(100, 2.0, seed);
    EXPECT_NEAR(mu.norm(), 1.0, 1e-12);
    EXPECT_LE(mu.cwiseAbs().maxCoeff(), 0.2 + 1e-15);
  }
}

TEST(Mean, RejectsInfeasibleBound) {
  EXPECT_THROW(md::make_mean(4, 0.99), std::invalid_argument);
  EXPECT_THROW(md::make_mean(0, 1.0), std::invalid_argument);
  EXPECT_THROW(md::make_perturbed_mean(4, 0.5, 1), std::invalid_argument);
}

TEST(Bouquet, DegenerateVarianceCollapsesToMean) {
  const DenseVector mu = md::make_mean(30, 1.0);
  const DenseMatrix a = md::sample_bouquet(mu, 1e-12, 12, 5);
  for (Eigen::Index j = 0; j < a.cols(); ++j) EXPECT_LE((a.col(j) - mu).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Bouquet, Deterministic) {
  const DenseVector mu = md::make_mean(30, 1.0);
  EXPECT_EQ(md::sample_bouquet(mu, 0.3, 12, 5), md::sample_bouquet(mu, 0.3, 12, 5));
  EXPECT_NE(md::sample_bouquet(mu, 0.3, 12, 5), md::sample_bouquet(mu, 0.3, 12, 6));
}

TEST(Bouquet, MomentOracle) {
  const std::size_t m = 400;
  const std::size_t n = 200;
  const double nu = 0.3;
  const DenseVector mu = md::make_mean(m, 1.0);
  double sum = 0.0;
  double sumsq = 0.0;
  double count = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DenseMatrix z = md::sample_bouquet(mu, nu, n, seed).colwise() - mu;
    sum += z.sum();
    sumsq += z.squaredNorm();
    count += static_cast<double>(z.size());
  }
  const double var = nu * nu / static_cast<double>(m);
  const double mean = sum / count;
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(var / count));
  const double sample_var = sumsq / count - mean * mean;
  EXPECT_NEAR(sample_var, var, 0.1 * var);
}

TEST(Bouquet, RejectsNonUnitMean) {
  EXPECT_THROW(md::sample_bouquet(DenseVector::Ones(4), 0.1, 2, 0), std::invalid_argument);
  EXPECT_THROW(md::sample_bouquet(md::make_mean(4, 1.0), 0.0, 2, 0), std::invalid_argument);
}

TEST(Pattern, RhoZeroAndOne) {
  const auto p0 = md::sample_pattern(params(10, 5, 0.1, 2, 0.0), 3);
  EXPECT_TRUE(p0.error_support.empty());
  EXPECT_TRUE(p0.error_signs.empty());
  const auto p1 = md::sample_pattern(params(10, 5, 0.1, 2, 1.0), 3);
  ASSERT_EQ(p1.error_support.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(p1.error_support[i], i);
}

TEST(Pattern, Uniformity) {
  const auto p = params(10, 5, 0.1, 1, 0.3);
  ASSERT_EQ(p.k2(), 3u);
  std::vector<double> hits(10, 0.0);
  std::vector<double> signal_hits(5, 0.0);
  double plus = 0.0;
  const int seeds = 60000;
  for (int s = 0; s < seeds; ++s) {
    const auto pat = md::sample_pattern(p, cab::derive_seed(99, static_cast<std::uint64_t>(s)));
    for (std::size_t j : pat.error_support) hits[j] += 1.0;
    for (std::size_t i : pat.signal_support) signal_hits[i] += 1.0;
    for (int sg : pat.error_signs) plus += sg > 0 ? 1.0 : 0.0;
  }
  for (double h : hits) EXPECT_NEAR(h / seeds, 0.3, 0.01);
  for (double h : signal_hits) EXPECT_NEAR(h / seeds, 0.2, 0.01);
  EXPECT_NEAR(plus / (3.0 * seeds), 0.5, 0.01);
}

TEST(Params, K2GuardsRepresentationError) {
  EXPECT_EQ(params(100, 10, 0.1, 1, 0.29).k2(), 29u);
  EXPECT_EQ(params(100, 10, 0.1, 1, 0.57).k2(), 57u);
  EXPECT_EQ(params(500, 10, 0.1, 1, 0.35).k2(), 175u);
  EXPECT_EQ(params(7, 2, 0.1, 1, 0.5).k2(), 3u);
}

TEST(Params, ValidationErrors) {
  EXPECT_NO_THROW(params(10, 5, 0.1, 1, 0.5).validate());
  EXPECT_THROW(params(0, 5, 0.1, 1, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 0, 0.1, 1, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 5, 0.0, 1, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 5, 0.1, 0, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 5, 0.1, 6, 0.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 5, 0.1, 1, 1.5).validate(), std::invalid_argument);
  EXPECT_THROW(params(10, 5, 0.1, 1, -0.1).validate(), std::invalid_argument);
  auto p = params(10, 5, 0.1, 1, 0.5);
  p.c_mu = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Params, WeakProportionalGrowth) {
  const auto p = md::weak_proportional_growth(400, 0.25, 1.0, 0.5, 0.05, 0.3, 9);
  EXPECT_EQ(p.n, 100u);
  EXPECT_EQ(p.k1, 20u);
  EXPECT_EQ(p.k2(), 120u);
}

TEST(Synthesize, SingleColumnClean) {
  const auto inst = md::synthesize(params(20, 6, 0.1, 1, 0.0, 4));
  const std::size_t i = inst.pattern.signal_support.at(0);
  EXPECT_EQ(inst.y, inst.a.col(static_cast<Eigen::Index>(i)));
  EXPECT_EQ(inst.e0.norm(), 0.0);
}

TEST(Synthesize, FullyCorrupted) {
  const auto inst = md::synthesize(params(20, 6, 0.1, 1, 1.0, 4));
  const std::size_t i = inst.pattern.signal_support.at(0);
  DenseVector sigma(20);
  for (std::size_t j = 0; j < 20; ++j) sigma(static_cast<Eigen::Index>(j)) = inst.pattern.error_signs[j];
  EXPECT_LE((inst.y - inst.a.col(static_cast<Eigen::Index>(i)) - sigma).norm(), 1e-15);
}

TEST(Synthesize, FigureFiveDimensions) {
  const auto inst = md::synthesize(params(500, 125, 0.05, 15, 0.5, 1));
  EXPECT_EQ(inst.a.rows(), 500);
  EXPECT_EQ(inst.a.cols(), 125);
  EXPECT_EQ(inst.pattern.signal_support.size(), 15u);
  EXPECT_EQ(inst.pattern.error_support.size(), 250u);
  EXPECT_NO_THROW(inst.check_invariants());
}

TEST(Synthesize, RandomizedMagnitudesKeepPattern) {
  md::SynthesisOptions opts;
  opts.randomize_magnitudes = true;
  const auto p = params(40, 10, 0.1, 3, 0.3, 8);
  const auto plain = md::synthesize(p);
  const auto random = md::synthesize(p, opts);
  EXPECT_EQ(plain.pattern, random.pattern);
  EXPECT_EQ(plain.a, random.a);
  for (std::size_t i : random.pattern.signal_support) {
    const double v = random.x0(static_cast<Eigen::Index>(i));
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 2.0);
  }
  for (std::size_t j : random.pattern.error_support) {
    const double v = std::abs(random.e0(static_cast<Eigen::Index>(j)));
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 2.0);
  }
}

TEST(Synthesize, PatternRecomputationProperty) {
  cab::testing::Gen g(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = g.index(1, 60);
    const std::size_t n = g.index(1, 30);
    auto p = params(m, n, g.uniform(0.01, 1.0), g.index(1, n), g.uniform(0.0, 1.0), g.seed());
    md::SynthesisOptions opts;
    opts.randomize_magnitudes = t % 2 == 1;
    opts.mean = t % 3 == 0 ? md::MeanKind::PerturbedFlat : md::MeanKind::Flat;
    if (opts.mean == md::MeanKind::PerturbedFlat) p.c_mu = 3.0;
    const auto inst = md::synthesize(p, opts);
    EXPECT_EQ(md::pattern_from_vectors(inst.x0, inst.e0), inst.pattern);
    EXPECT_NO_THROW(inst.check_invariants());
  }
}

TEST(Synthesize, InvariantViolationNamed) {
  auto inst = md::synthesize(params(20, 6, 0.1, 2, 0.2, 4));
  inst.x0(static_cast<Eigen::Index>(inst.pattern.signal_support[0])) = -1.0;
  try {
    inst.check_invariants();
    FAIL() << "expected logic_error";
  } catch (const std::logic_error& e) {
    EXPECT_NE(std::string(e.what()).find("x0 >= 0"), std::string::npos);
  }
}

TEST(Serialization, RoundTripAndDeterminism) {
  const auto p = params(30, 8, 0.2, 2, 0.4, 17);
  const auto a = scratch_dir("a");
  const auto b = scratch_dir("b");
  md::save_instance(md::synthesize(p), a);
  md::save_instance(md::synthesize(p), b);
  for (const char* f : {"params.json", "pattern.json", "A.mat", "mu.mat", "x0.mat", "e0.mat", "y.mat"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  const auto loaded = md::load_instance(a);
  const auto fresh = md::synthesize(p);
  EXPECT_EQ(loaded.a, fresh.a);
  EXPECT_EQ(loaded.y, fresh.y);
  EXPECT_EQ(loaded.pattern, fresh.pattern);
  EXPECT_EQ(loaded.params.seed, 17u);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Serialization, CorruptFilesRejected) {
  const auto dir = scratch_dir("c");
  md::save_instance(md::synthesize(params(10, 4, 0.2, 1, 0.2, 1)), dir);
  {
    std::ofstream os(dir / "pattern.json");
    os << "{\"I\": [0]}";
  }
  EXPECT_THROW(md::load_instance(dir), cab::FormatError);
  std::filesystem::remove_all(dir);
  EXPECT_ANY_THROW(md::load_instance(dir));
}
