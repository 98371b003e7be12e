#include "cab/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cab/rng.hpp"

namespace cab::model {

namespace {

// Stream identifiers for derive_seed(params.seed, stream).
constexpr std::uint64_t kMeanStream = 1;
constexpr std::uint64_t kBouquetStream = 2;
constexpr std::uint64_t kPatternStream = 3;
constexpr std::uint64_t kMagnitudeStream = 4;

void invariant(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("ProblemInstance invariant violated: ") + what);
}

}  // namespace

std::size_t ModelParams::k2() const {
  const double raw = rho * static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return k > m ? m : k;
}

void ModelParams::validate() const {
  if (m < 1) throw std::invalid_argument("ModelParams: m must be >= 1");
  if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("ModelParams: nu must be > 0");
  if (!(c_mu >= 1.0) || !std::isfinite(c_mu)) {
    throw std::invalid_argument("ModelParams: c_mu must be >= 1");
  }
  if (k1 < 1 || k1 > n) throw std::invalid_argument("ModelParams: need 1 <= k1 <= n");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("ModelParams: rho must lie in [0, 1]");
}

ModelParams weak_proportional_growth(std::size_t m, double delta, double c0, double eta0,
                                     double nu, double rho, std::uint64_t seed) {
  ModelParams p;
  p.m = m;
  p.n = static_cast<std::size_t>(std::llround(delta * static_cast<double>(m)));
  p.k1 = static_cast<std::size_t>(std::llround(c0 * std::pow(static_cast<double>(m), 1.0 - eta0)));
  p.nu = nu;
  p.rho = rho;
  p.seed = seed;
  p.validate();
  return p;
}

DenseVector make_mean(std::size_t m, double c_mu) {
  if (m < 1) throw std::invalid_argument("make_mean: m must be >= 1");
  if (!(c_mu >= 1.0)) {
    throw std::invalid_argument("make_mean: c_mu < 1 is infeasible for a unit vector");
  }
  return DenseVector::Constant(static_cast<Eigen::Index>(m), 1.0 / std::sqrt(static_cast<double>(m)));
}

DenseVector make_perturbed_mean(std::size_t m, double c_mu, std::uint64_t seed,
                                std::size_t max_attempts) {
  if (m < 1) throw std::invalid_argument("make_perturbed_mean: m must be >= 1");
  if (!(c_mu >= 1.0)) {
    throw std::invalid_argument("make_perturbed_mean: c_mu < 1 is infeasible for a unit vector");
  }
  const double bound = c_mu / std::sqrt(static_cast<double>(m));
  CounterRng rng(seed);
  DenseVector mu(static_cast<Eigen::Index>(m));
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = rng.gaussian();
    const double norm = mu.norm();
    if (norm == 0.0) continue;
    mu /= norm;
    if (mu.cwiseAbs().maxCoeff() <= bound) return mu;
  }
  throw std::runtime_error("make_perturbed_mean: no admissible draw within attempt budget");
}

DenseMatrix sample_bouquet(const DenseVector& mu, double nu, std::size_t n, std::uint64_t seed) {
  numerics::require_finite(mu, "sample_bouquet");
  if (std::abs(mu.norm() - 1.0) > 1e-10) throw std::invalid_argument("sample_bouquet: ||mu||_2 != 1");
  if (!(nu > 0.0)) throw std::invalid_argument("sample_bouquet: nu must be > 0");
  const Eigen::Index m = mu.size();
  const double sd = nu / std::sqrt(static_cast<double>(m));
  CounterRng rng(seed);
  DenseMatrix a(m, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = mu(i) + sd * rng.gaussian();
  }
  return a;
}

SupportPattern sample_pattern(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  CounterRng rng(seed);
  SupportPattern p;
  p.signal_support = rng.subset(params.n, params.k1);
  p.error_support = rng.subset(params.m, params.k2());
  p.error_signs.reserve(p.error_support.size());
  for (std::size_t i = 0; i < p.error_support.size(); ++i) {
    p.error_signs.push_back(rng.sign() > 0 ? 1 : -1);
  }
  return p;
}

ProblemInstance realize(const ModelParams& params, DenseVector mu, DenseMatrix a,
                        SupportPattern pattern, std::optional<std::uint64_t> magnitude_seed) {
  params.validate();
  if (a.rows() != static_cast<Eigen::Index>(params.m) ||
      a.cols() != static_cast<Eigen::Index>(params.n) || mu.size() != a.rows()) {
    throw DimensionMismatch("realize: A / mu do not match params");
  }
  ProblemInstance inst;
  inst.params = params;
  inst.x0 = DenseVector::Zero(a.cols());
  inst.e0 = DenseVector::Zero(a.rows());
  std::optional<CounterRng> rng;
  if (magnitude_seed) rng.emplace(*magnitude_seed);
  for (std::size_t i : pattern.signal_support) {
    inst.x0(static_cast<Eigen::Index>(i)) = rng ? rng->uniform(0.5, 2.0) : 1.0;
  }
  for (std::size_t t = 0; t < pattern.error_support.size(); ++t) {
    const double mag = rng ? rng->uniform(0.5, 2.0) : 1.0;
    inst.e0(static_cast<Eigen::Index>(pattern.error_support[t])) = pattern.error_signs[t] * mag;
  }
  inst.y = a * inst.x0 + inst.e0;
  inst.mu = std::move(mu);
  inst.a = std::move(a);
  inst.pattern = std::move(pattern);
  inst.check_invariants();
  return inst;
}

ProblemInstance synthesize(const ModelParams& params, const SynthesisOptions& opts) {
  params.validate();
  DenseVector mu = opts.mean == MeanKind::Flat
                       ? make_mean(params.m, params.c_mu)
                       : make_perturbed_mean(params.m, params.c_mu, derive_seed(params.seed, kMeanStream));
  DenseMatrix a = sample_bouquet(mu, params.nu, params.n, derive_seed(params.seed, kBouquetStream));
  SupportPattern pattern = sample_pattern(params, derive_seed(params.seed, kPatternStream));
  std::optional<std::uint64_t> mag;
  if (opts.randomize_magnitudes) mag = derive_seed(params.seed, kMagnitudeStream);
  return realize(params, std::move(mu), std::move(a), std::move(pattern), mag);
}

SupportPattern pattern_from_vectors(const DenseVector& x0, const DenseVector& e0) {
  SupportPattern p;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (x0(i) != 0.0) p.signal_support.push_back(static_cast<std::size_t>(i));
  }
  for (Eigen::Index j = 0; j < e0.size(); ++j) {
    if (e0(j) != 0.0) {
      p.error_support.push_back(static_cast<std::size_t>(j));
      p.error_signs.push_back(e0(j) > 0 ? 1 : -1);
    }
  }
  return p;
}

void ProblemInstance::check_invariants() const {
  const auto m = static_cast<Eigen::Index>(params.m);
  const auto n = static_cast<Eigen::Index>(params.n);
  invariant(mu.size() == m && a.rows() == m && a.cols() == n, "dimensions of mu / A");
  invariant(x0.size() == n && e0.size() == m && y.size() == m, "dimensions of x0 / e0 / y");
  invariant(mu.allFinite() && a.allFinite() && x0.allFinite() && e0.allFinite() && y.allFinite(),
            "finite entries");
  invariant(std::abs(mu.norm() - 1.0) <= 1e-12, "||mu||_2 == 1");
  invariant(mu.cwiseAbs().maxCoeff() <= params.c_mu / std::sqrt(static_cast<double>(params.m)) + 1e-15,
            "||mu||_inf <= c_mu / sqrt(m)");
  invariant((x0.array() >= 0.0).all(), "x0 >= 0");
  invariant(pattern.signal_support.size() == params.k1, "|I| == k1");
  invariant(pattern.error_support.size() == params.k2(), "|J| == k2");
  invariant(pattern.error_signs.size() == pattern.error_support.size(), "|sigma| == |J|");
  for (int s : pattern.error_signs) invariant(s == 1 || s == -1, "sigma in {-1, +1}");
  invariant(pattern_from_vectors(x0, e0) == pattern, "supp / sgn of (x0, e0) match pattern");
  const double resid = (a * x0 + e0 - y).norm();
  invariant(resid <= 1e-12 * (1.0 + y.norm()), "y == A x0 + e0");
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ModelParams& p = inst.params;
  nlohmann::json params = {
      {"m", p.m},   {"n", p.n},         {"nu", p.nu},     {"c_mu", p.c_mu},
      {"k1", p.k1}, {"rho", p.rho},     {"seed", p.seed}, {"k2", p.k2()},
      {"delta", p.delta()},
  };
  nlohmann::json pattern = {
      {"I", inst.pattern.signal_support},
      {"J", inst.pattern.error_support},
      {"sigma", inst.pattern.error_signs},
  };
  auto write_json = [&](const char* name, const nlohmann::json& j) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << j.dump(2) << '\n';
  };
  write_json("params.json", params);
  write_json("pattern.json", pattern);
  numerics::write_matrix_file(dir / "A.mat", inst.a);
  numerics::write_matrix_file(dir / "mu.mat", inst.mu);
  numerics::write_matrix_file(dir / "x0.mat", inst.x0);
  numerics::write_matrix_file(dir / "e0.mat", inst.e0);
  numerics::write_matrix_file(dir / "y.mat", inst.y);
}

ProblemInstance load_instance(const std::filesystem::path& dir) {
  auto read_json = [&](const char* name) {
    std::ifstream is(dir / name);
    if (!is) throw std::runtime_error("cannot open " + (dir / name).string());
    try {
      return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError((dir / name).string() + ": " + e.what());
    }
  };
  const nlohmann::json pj = read_json("params.json");
  const nlohmann::json tj = read_json("pattern.json");
  ProblemInstance inst;
  try {
    inst.params.m = pj.at("m").get<std::size_t>();
    inst.params.n = pj.at("n").get<std::size_t>();
    inst.params.nu = pj.at("nu").get<double>();
    inst.params.c_mu = pj.at("c_mu").get<double>();
    inst.params.k1 = pj.at("k1").get<std::size_t>();
    inst.params.rho = pj.at("rho").get<double>();
    inst.params.seed = pj.at("seed").get<std::uint64_t>();
    inst.pattern.signal_support = tj.at("I").get<std::vector<std::size_t>>();
    inst.pattern.error_support = tj.at("J").get<std::vector<std::size_t>>();
    inst.pattern.error_signs = tj.at("sigma").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
  inst.params.validate();
  inst.a = numerics::read_matrix_file(dir / "A.mat");
  inst.mu = numerics::read_vector_file(dir / "mu.mat");
  inst.x0 = numerics::read_vector_file(dir / "x0.mat");
  inst.e0 = numerics::read_vector_file(dir / "e0.mat");
  inst.y = numerics::read_vector_file(dir / "y.mat");
  inst.check_invariants();
  return inst;
}

}  // namespace cab::model
