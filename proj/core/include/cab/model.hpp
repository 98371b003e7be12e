#pragma once

// Cross-and-bouquet problem generation. A bouquet matrix A has iid columns
// N(mu, nu^2/m I) around a unit mean mu with ||mu||_inf <= c_mu / sqrt(m);
// observations are y = A x0 + e0 with x0 >= 0 supported on I and e0 supported
// on J with signs sigma.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "cab/numerics.hpp"

namespace cab::model {

struct ModelParams {
  std::size_t m = 0;
  std::size_t n = 0;
  double nu = 0.05;
  double c_mu = 1.0;
  std::size_t k1 = 1;
  double rho = 0.0;
  std::uint64_t seed = 0;

  /// floor(rho * m), guarded against representation error (0.29 * 100).
  std::size_t k2() const;
  double delta() const { return static_cast<double>(n) / static_cast<double>(m); }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Weak proportional growth: n = round(delta m), k1 = round(c0 m^(1 - eta0)).
ModelParams weak_proportional_growth(std::size_t m, double delta, double c0, double eta0,
                                     double nu, double rho, std::uint64_t seed);

struct SupportPattern {
  std::vector<std::size_t> signal_support;  // I, sorted, subset of [n]
  std::vector<std::size_t> error_support;   // J, sorted, subset of [m]
  std::vector<int> error_signs;             // sigma, one +-1 per element of J

  bool operator==(const SupportPattern&) const = default;
};

enum class MeanKind { Flat, PerturbedFlat };

struct SynthesisOptions {
  MeanKind mean = MeanKind::Flat;
  /// Replace the unit magnitudes of x0 / e0 with draws uniform on [0.5, 2]
  /// (signs of e0 preserved).
  bool randomize_magnitudes = false;
};

struct ProblemInstance {
  ModelParams params;
  DenseVector mu;
  DenseMatrix a;
  DenseVector x0;
  DenseVector e0;
  DenseVector y;
  SupportPattern pattern;

  /// Throws std::logic_error naming the first violated invariant.
  void check_invariants() const;
};

/// Flat unit vector 1/sqrt(m). Throws if c_mu < 1 (no unit vector fits).
DenseVector make_mean(std::size_t m, double c_mu);

/// Random unit vector resampled until ||mu||_inf <= c_mu / sqrt(m).
DenseVector make_perturbed_mean(std::size_t m, double c_mu, std::uint64_t seed,
                                std::size_t max_attempts = 1'000'000);

/// n columns a_i = mu + z_i, z_i iid N(0, nu^2/m I).
DenseMatrix sample_bouquet(const DenseVector& mu, double nu, std::size_t n, std::uint64_t seed);

SupportPattern sample_pattern(const ModelParams& params, std::uint64_t seed);

/// Builds x0, e0, y for a given A and pattern. When magnitude_seed is set,
/// magnitudes are drawn uniform on [0.5, 2]; otherwise they are 1.
ProblemInstance realize(const ModelParams& params, DenseVector mu, DenseMatrix a,
                        SupportPattern pattern,
                        std::optional<std::uint64_t> magnitude_seed = std::nullopt);

/// Full seeded synthesis from params.seed.
ProblemInstance synthesize(const ModelParams& params, const SynthesisOptions& opts = {});

/// Recomputes (I, J, sigma) from x0 and e0.
SupportPattern pattern_from_vectors(const DenseVector& x0, const DenseVector& e0);

// Instance directory: params.json, pattern.json, A.mat, mu.mat, x0.mat,
// e0.mat, y.mat.
void save_instance(const ProblemInstance& inst, const std::filesystem::path& dir);
ProblemInstance load_instance(const std::filesystem::path& dir);

}  // namespace cab::model
