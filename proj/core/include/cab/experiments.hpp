#pragma once

// Monte Carlo sweeps over cross-and-bouquet parameter grids, figure presets,
// and the certificate trace demo.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cab/certificate.hpp"
#include "cab/model.hpp"
#include "cab/solver.hpp"

namespace cab::experiments {

enum class Method { ExtendedL1, OrthComplement, OMP, ROMP, CertificateExact, CertificateIterative };

std::string_view to_string(Method m);
/// Accepts the names produced by to_string. Throws std::invalid_argument.
Method method_from_string(std::string_view name);

struct K1Rule {
  enum class Kind { Fixed, SqrtM, FracM, WPG };
  Kind kind = Kind::Fixed;
  std::size_t k = 1;        // Fixed
  double fraction = 0.05;   // FracM
  double c0 = 1.0;          // WPG: round(c0 m^(1 - eta0))
  double eta0 = 0.5;

  static K1Rule fixed(std::size_t k);
  static K1Rule sqrt_m();
  static K1Rule frac_m(double fraction);
  static K1Rule wpg(double c0, double eta0);

  /// Realized k1 for ambient dimension m, clamped to [1, n].
  std::size_t resolve(std::size_t m, std::size_t n) const;
  std::string describe() const;
};

struct SweepConfig {
  std::vector<std::size_t> m_values;
  /// Exactly one of n_values / delta_values is nonempty; n = round(delta m).
  std::vector<std::size_t> n_values;
  std::vector<double> delta_values;
  std::vector<double> nu_values;
  std::vector<double> rho_values;
  K1Rule k1_rule;
  double c_mu = 1.0;
  std::vector<Method> methods;
  std::size_t trials_per_cell = 100;
  std::uint64_t base_seed = 0;
  double eps = certificate::kDefaultEps;
  std::size_t certificate_max_iter = 500;
  solver::SolveOptions solve;
  /// Cells whose estimated wall time exceeds this are skipped; 0 disables.
  double cell_time_budget_seconds = 0.0;
  /// Worker threads; 0 uses the hardware concurrency.
  std::size_t jobs = 1;
  /// When false, mean_solve_seconds is written as 0 so output is byte-stable.
  bool record_timings = true;

  std::string preset;            // metadata only
  std::size_t paper_trials = 0;  // metadata only

  void validate() const;
  /// Expanded grid in (m, n, nu, rho) lexicographic order. Seeds are left 0.
  std::vector<model::ModelParams> grid() const;
};

struct SweepRecord {
  std::size_t m = 0;
  std::size_t n = 0;
  double nu = 0.0;
  double rho = 0.0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  Method method = Method::ExtendedL1;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double mean_solve_seconds = 0.0;
  double mean_iterations = 0.0;

  double success_frac() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

struct SweepHooks {
  std::function<void(std::string_view)> log;
  /// Called with (completed tasks, total tasks); may run on worker threads.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Seed of trial `trial` in grid cell `cell`.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t cell, std::size_t trial);

/// Coarse flop-count estimate of one cell's wall time on a single core.
double estimate_cell_seconds(const model::ModelParams& cell, const std::vector<Method>& methods,
                             std::size_t trials);

/// Rows ordered by (cell, method). Trial failures count as non-success.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, const SweepHooks& hooks = {});

/// Outcome of one method on one instance.
struct TrialOutcome {
  bool success = false;
  double seconds = 0.0;
  double iterations = 0.0;
};

TrialOutcome run_method(Method method, const model::ProblemInstance& inst, const SweepConfig& config);

struct PresetOptions {
  bool include_m1600 = false;
};

/// fig5, fig6_left, fig6_right, fig7_left, fig7_right, fig8.
SweepConfig figure_preset(std::string_view name, const PresetOptions& opts = {});
std::vector<std::string> preset_names();

/// JSON form of SweepConfig; see README for keys.
SweepConfig sweep_config_from_json(std::string_view text);
std::string sweep_config_to_json(const SweepConfig& config);

struct DemoParams {
  std::size_t m = 3000;
  double delta = 0.4;
  double nu = 0.1;
  double rho = 0.65;
  std::size_t k1 = 10;
  double eps = certificate::kDefaultEps;
  std::uint64_t seed = 0;
  std::size_t max_iter = 500;
};

struct DemoResult {
  model::ModelParams params;
  certificate::Certificate certificate;
  certificate::Diagnostics diagnostics;
};

/// Writes profiles.csv (iteration, rank, abs_q sorted descending),
/// trace.csv (iteration, theta_norm, violations, invalid, inf_norm) and summary.json
/// into out_dir. An empty out_dir skips file output.
DemoResult run_certificate_demo(const DemoParams& params, const std::filesystem::path& out_dir);

}  // namespace cab::experiments
