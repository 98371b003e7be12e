// cab: command-line front end for generation, decoding, certification and
// Monte Carlo sweeps on the cross-and-bouquet model.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cab/baselines.hpp"
#include "cab/certificate.hpp"
#include "cab/channel.hpp"
#include "cab/experiments.hpp"
#include "cab/model.hpp"
#include "cab/report.hpp"
#include "cab/rng.hpp"
#include "cab/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string out_dir;
  std::size_t jobs = 1;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* out_dir_opt = nullptr;
};

struct InstanceArgs {
  std::size_t m = 500;
  std::optional<std::size_t> n;
  double delta = 0.25;
  double nu = 0.05;
  double c_mu = 1.0;
  std::size_t k1 = 15;
  double rho = 0.5;
  bool perturbed_mean = false;
  bool randomize_magnitudes = false;

  void add_to(CLI::App* app) {
    app->add_option("--m", m, "Ambient dimension")->capture_default_str();
    app->add_option("--n", n, "Bouquet size (overrides --delta)");
    app->add_option("--delta", delta, "n = round(delta m)")->capture_default_str();
    app->add_option("--nu", nu, "Bouquet spread")->capture_default_str();
    app->add_option("--c-mu", c_mu, "Mean flatness bound")->capture_default_str();
    app->add_option("--k1", k1, "Signal support size")->capture_default_str();
    app->add_option("--rho", rho, "Error density")->capture_default_str();
    app->add_flag("--perturbed-mean", perturbed_mean, "Random mean vector instead of the flat one");
    app->add_flag("--randomize-magnitudes", randomize_magnitudes, "Magnitudes uniform on [0.5, 2]");
  }

  cab::model::ModelParams params(std::uint64_t seed) const {
    cab::model::ModelParams p;
    p.m = m;
    p.n = n ? *n : static_cast<std::size_t>(std::llround(delta * static_cast<double>(m)));
    p.nu = nu;
    p.c_mu = c_mu;
    p.k1 = k1;
    p.rho = rho;
    p.seed = seed;
    p.validate();
    return p;
  }

  cab::model::SynthesisOptions synthesis() const {
    cab::model::SynthesisOptions o;
    o.mean = perturbed_mean ? cab::model::MeanKind::PerturbedFlat : cab::model::MeanKind::Flat;
    o.randomize_magnitudes = randomize_magnitudes;
    return o;
  }
};

struct SolveArgs {
  cab::solver::SolveOptions opts;

  void add_to(CLI::App* app) {
    app->add_option("--tol", opts.primal_dual_tolerance, "Relative duality gap")->capture_default_str();
    app->add_option("--max-ipm-iter", opts.max_iterations, "Interior-point iteration cap")->capture_default_str();
    app->add_option("--threshold", opts.success_threshold, "Success threshold")->capture_default_str();
  }
};

fs::path out_dir_or(const Globals& g, const fs::path& fallback) {
  return g.out_dir_opt->count() > 0 ? fs::path(g.out_dir) : fallback;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_gen(const Globals& g, const InstanceArgs& ia) {
  const auto inst = cab::model::synthesize(ia.params(g.seed), ia.synthesis());
  const fs::path dir = out_dir_or(g, "instance");
  cab::model::save_instance(inst, dir);
  std::cout << "wrote instance m=" << inst.params.m << " n=" << inst.params.n << " k1=" << inst.params.k1
            << " k2=" << inst.params.k2() << " to " << dir.string() << '\n';
  return 0;
}

int cmd_solve(const Globals& g, const std::string& instance_dir, const SolveArgs& sa) {
  const auto inst = cab::model::load_instance(instance_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = cab::solver::solve_extended_l1(inst.a, inst.y, sa.opts);
  const double seconds = seconds_since(t0);
  const fs::path dir = out_dir_or(g, instance_dir);
  fs::create_directories(dir);
  cab::numerics::write_matrix_file(dir / "x_hat.mat", sol.x_hat);
  cab::numerics::write_matrix_file(dir / "e_hat.mat", sol.e_hat);
  const double dev = cab::solver::recovery_deviation(sol, inst);
  const bool success = cab::solver::judge_success(sol, inst, sa.opts.success_threshold);
  write_json(dir / "solution.json", {{"status", std::string(cab::solver::to_string(sol.status))},
                                     {"objective", sol.objective},
                                     {"duality_gap", sol.duality_gap},
                                     {"primal_residual", sol.primal_residual},
                                     {"iterations", sol.iterations},
                                     {"max_abs_deviation", dev},
                                     {"success", success},
                                     {"seconds", seconds}});
  std::cout << "status=" << cab::solver::to_string(sol.status) << " objective=" << sol.objective
            << " iterations=" << sol.iterations << " success=" << (success ? "true" : "false") << '\n';
  return 0;
}

int cmd_certify(const Globals& g, const std::string& instance_dir, double eps, std::size_t max_iter,
                const std::string& mode, double xi_c, std::size_t xi_trials) {
  const auto inst = cab::model::load_instance(instance_dir);
  const auto prob = cab::certificate::build_separator_problem(inst.a, inst.pattern, eps);
  json out;
  out["p"] = prob.p();
  out["n"] = prob.n();
  out["eps"] = eps;
  if (mode == "exact" || mode == "both") {
    const auto v = cab::certificate::verify_recoverability_exact(prob);
    out["exact"] = {{"recoverable", v.recoverable},
                    {"marginal", v.marginal},
                    {"t_star", v.min_inf_norm},
                    {"lp_optimal", v.lp_optimal},
                    {"lp_iterations", v.lp_iterations}};
    std::cout << "exact: recoverable=" << (v.recoverable ? "true" : "false") << " t*=" << v.min_inf_norm
              << (v.marginal ? " (marginal)" : "") << '\n';
  }
  if (mode == "iterative" || mode == "both") {
    cab::certificate::RefineOptions ro;
    ro.max_iter = max_iter;
    const auto c = cab::certificate::refine_separator(prob, ro);
    out["iterative"] = {{"converged", c.converged},
                        {"stalled", c.stalled},
                        {"iterations", c.iterations},
                        {"q_inf_norm", c.q_inf_norm},
                        {"constraint_residual", c.constraint_residual},
                        {"violation_counts", c.violation_counts},
                        {"invalid_counts", c.invalid_counts},
                        {"theta_norms", c.theta_norms},
                        {"inf_norms", c.inf_norms}};
    std::cout << "iterative: converged=" << (c.converged ? "true" : "false") << " iterations=" << c.iterations
              << " ||q||_inf=" << c.q_inf_norm << '\n';
  }
  cab::certificate::DiagnosticsOptions dopt;
  dopt.xi_c = xi_c;
  dopt.xi_trials = xi_trials;
  dopt.seed = g.seed;
  const auto d = cab::certificate::measure_diagnostics(inst, prob, dopt);
  json diag = {{"q0_norm", d.q0_norm},
               {"theta_q0_norm", d.theta_q0_norm},
               {"q0_norm_over_sqrt_m", d.q0_norm_over_sqrt_m},
               {"theta_q0_norm_over_sqrt_m", d.theta_q0_norm_over_sqrt_m},
               {"q0_inf_norm", d.q0_inf_norm},
               {"initial_violations", d.initial_violations},
               {"mu_jc_norm_sq", d.mu_jc_norm_sq},
               {"xi_hat", d.xi.xi_hat},
               {"xi_k", d.xi.k},
               {"xi_trials", d.xi.trials},
               {"xi_lower_bound", d.xi.lower_bound}};
  if (d.xi.xi_hat < 1.0) {
    const auto l2 = cab::certificate::check_lemma2_conditions(cab::certificate::initial_separator(prob),
                                                              d.xi.xi_hat, eps, xi_c,
                                                              static_cast<std::size_t>(prob.p()));
    diag["sufficient_condition"] = {{"holds", l2.holds}, {"lhs", l2.lhs}, {"rhs", l2.rhs}};
  }
  out["diagnostics"] = diag;
  const fs::path dir = out_dir_or(g, instance_dir);
  fs::create_directories(dir);
  write_json(dir / "certificate.json", out);
  return 0;
}

int cmd_compare(const Globals& g, const std::vector<std::string>& instance_dirs, const InstanceArgs& ia,
                const SolveArgs& sa, const std::string& greedy) {
  std::vector<std::pair<std::string, cab::model::ProblemInstance>> instances;
  if (!instance_dirs.empty()) {
    for (const auto& d : instance_dirs) instances.emplace_back(d, cab::model::load_instance(d));
  } else {
    const std::size_t count = g.trials_opt->count() > 0 ? g.trials : 10;
    for (std::size_t t = 0; t < count; ++t) {
      const auto p = ia.params(cab::derive_seed(g.seed, 0, t));
      instances.emplace_back("gen" + std::to_string(t), cab::model::synthesize(p, ia.synthesis()));
    }
  }
  const auto variant = greedy == "omp" ? cab::baselines::GreedyVariant::OMP : cab::baselines::GreedyVariant::ROMP;

  std::ostringstream csv;
  csv << "instance,method,success,max_abs_dev,seconds\n";
  for (const auto& [name, inst] : instances) {
    const auto record = [&](std::string_view method, const cab::solver::RecoverySolution& sol, double secs) {
      const double dev = cab::solver::recovery_deviation(sol, inst);
      csv << name << ',' << method << ',' << (cab::solver::judge_success(sol, inst, sa.opts.success_threshold) ? 1 : 0)
          << ',' << cab::report::format_number(dev) << ',' << cab::report::format_number(secs) << '\n';
    };
    auto t0 = std::chrono::steady_clock::now();
    const auto l1 = cab::solver::solve_extended_l1(inst.a, inst.y, sa.opts);
    record("ExtendedL1", l1, seconds_since(t0));
    if (inst.a.cols() < inst.a.rows()) {
      t0 = std::chrono::steady_clock::now();
      const auto oc = cab::baselines::orthogonal_complement_decode(inst.a, inst.y, sa.opts);
      record("OrthComplement", oc, seconds_since(t0));
    } else {
      std::cerr << name << ": OrthComplement skipped (requires n < m)\n";
    }
    cab::baselines::GreedyOptions go;
    go.variant = variant;
    go.max_atoms = cab::baselines::default_max_atoms(variant, inst.params.k1, inst.params.k2(), inst.params.m,
                                                     inst.params.n);
    t0 = std::chrono::steady_clock::now();
    const auto gr = cab::baselines::greedy_decode(inst.a, inst.y, go);
    record(cab::baselines::to_string(variant), gr.solution, seconds_since(t0));
  }
  std::cout << csv.str();
  if (g.out_dir_opt->count() > 0) {
    fs::create_directories(g.out_dir);
    std::ofstream os(fs::path(g.out_dir) / "compare.csv");
    if (!os) throw std::runtime_error("cannot write " + (fs::path(g.out_dir) / "compare.csv").string());
    os << csv.str();
  }
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& preset, const std::string& config_path, bool include_m1600,
              double time_budget, bool no_timings, bool quiet) {
  cab::experiments::SweepConfig cfg;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open " + config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    cfg = cab::experiments::sweep_config_from_json(ss.str());
  } else {
    cab::experiments::PresetOptions po;
    po.include_m1600 = include_m1600;
    cfg = cab::experiments::figure_preset(preset, po);
  }
  if (g.trials_opt->count() > 0) cfg.trials_per_cell = g.trials;
  cfg.base_seed = g.seed;
  cfg.jobs = g.jobs;
  if (time_budget > 0.0) cfg.cell_time_budget_seconds = time_budget;
  cfg.record_timings = !no_timings;

  cab::experiments::SweepHooks hooks;
  hooks.log = [](std::string_view msg) { std::cerr << "[sweep] " << msg << '\n'; };
  if (!quiet) {
    hooks.progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0) std::cerr << "\r[sweep] " << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const auto records = cab::experiments::run_sweep(cfg, hooks);

  const fs::path dir = g.out_dir_opt->count() > 0 ? fs::path(g.out_dir) : fs::path("sweep_" + cfg.preset);
  fs::create_directories(dir);
  const auto meta = cab::report::metadata_for(cfg);
  cab::report::write_csv(dir / "sweep.csv", records, &meta);
  cab::report::ChartSpec spec;
  spec.title = cfg.preset + " (" + std::to_string(cfg.trials_per_cell) + " trials per point)";
  cab::report::render_chart(records, dir / "sweep.svg", spec);
  {
    std::ofstream os(dir / "config.json");
    os << cab::experiments::sweep_config_to_json(cfg) << '\n';
  }
  cab::report::emit_csv(std::cout, records, &meta);
  std::cerr << "[sweep] wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.svg").string() << '\n';
  return 0;
}

int cmd_channel(const Globals& g, const cab::channel::ChannelParams& cp, const std::string& bits,
                const std::string& text, std::size_t random_bits, const SolveArgs& sa) {
  std::string payload;
  if (!bits.empty()) {
    payload = bits;
  } else if (!text.empty()) {
    payload = cab::channel::bits_from_text(text);
  } else {
    payload = cab::channel::random_bits(random_bits, g.seed);
  }
  const auto run = cab::channel::channel_roundtrip(payload, cp, g.seed, sa.opts);
  std::size_t failed = 0;
  for (bool ok : run.symbol_decoded) failed += ok ? 0 : 1;
  std::cout << "payload bits=" << run.payload_bits.size() << " bits/symbol=" << run.bits_per_symbol
            << " symbols=" << run.symbols << " failed symbols=" << failed
            << " exact=" << (run.exact ? "true" : "false") << '\n';
  std::cout << "sent:     " << run.payload_bits << '\n' << "received: " << run.decoded_bits << '\n';
  if (g.out_dir_opt->count() > 0) {
    fs::create_directories(g.out_dir);
    write_json(fs::path(g.out_dir) / "channel.json", {{"m", cp.m},
                                                      {"n", cp.n},
                                                      {"nu", cp.nu},
                                                      {"k1", run.k1},
                                                      {"rho", run.rho},
                                                      {"seed", g.seed},
                                                      {"payload_bits", run.payload_bits},
                                                      {"decoded_bits", run.decoded_bits},
                                                      {"bits_per_symbol", run.bits_per_symbol},
                                                      {"symbols", run.symbols},
                                                      {"symbol_success", run.symbol_success},
                                                      {"symbol_decoded", run.symbol_decoded},
                                                      {"exact", run.exact}});
  }
  return run.exact ? 0 : 3;
}

int cmd_demo(const Globals& g, cab::experiments::DemoParams dp) {
  dp.seed = g.seed;
  const fs::path dir = g.out_dir_opt->count() > 0 ? fs::path(g.out_dir) : fs::path("demo_fig4");
  const auto r = cab::experiments::run_certificate_demo(dp, dir);
  const auto& c = r.certificate;
  std::cout << "m=" << r.params.m << " n=" << r.params.n << " k1=" << r.params.k1 << " k2=" << r.params.k2()
            << " converged=" << (c.converged ? "true" : "false") << " iterations=" << c.iterations << '\n';
  for (std::size_t k = 0; k < c.theta_norms.size(); ++k) {
    std::cout << "  iter " << k << ": violations=" << c.violation_counts[k] << " invalid=" << c.invalid_counts[k]
              << " ||theta q||=" << c.theta_norms[k]
              << " ||q||_inf=" << c.inf_norms[k] << '\n';
  }
  std::cout << "wrote traces to " << dir.string() << '\n';
  return c.converged ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense error correction on the cross-and-bouquet model"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
  g.trials_opt = app.add_option("--trials", g.trials, "Trials (per cell for sweeps)");
  g.out_dir_opt = app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps (0 = all cores)")->capture_default_str();

  InstanceArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Synthesize one instance into --out-dir");
  gen_args.add_to(gen);

  std::string solve_dir;
  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run the extended l1 decoder on an instance directory");
  solve->add_option("instance", solve_dir, "Instance directory")->required()->check(CLI::ExistingDirectory);
  solve_args.add_to(solve);

  std::string cert_dir;
  double eps = cab::certificate::kDefaultEps;
  std::size_t max_iter = 500;
  double xi_c = 0.02;
  std::size_t xi_trials = 200;
  bool exact_only = false;
  bool iterative_only = false;
  bool both = false;
  auto* certify = app.add_subcommand("certify", "Certify recoverability of an instance's sign/support pattern");
  certify->add_option("instance", cert_dir, "Instance directory")->required()->check(CLI::ExistingDirectory);
  certify->add_option("--eps", eps, "Protrusion margin")->capture_default_str();
  certify->add_option("--max-iter", max_iter, "Refinement iteration cap")->capture_default_str();
  auto* f_exact = certify->add_flag("--exact", exact_only, "Exact LP verdict only");
  auto* f_iter = certify->add_flag("--iterative", iterative_only, "Constructive refinement only");
  auto* f_both = certify->add_flag("--both", both, "Both (default)");
  f_exact->excludes(f_iter)->excludes(f_both);
  f_iter->excludes(f_both);
  certify->add_option("--xi-c", xi_c, "Sparsity fraction for the projection ratio")->capture_default_str();
  certify->add_option("--xi-trials", xi_trials, "Sampled supports for the projection ratio")->capture_default_str();

  std::vector<std::string> compare_dirs;
  InstanceArgs compare_args;
  SolveArgs compare_solve;
  std::string greedy = "romp";
  auto* compare = app.add_subcommand("compare", "Run extended l1, orthogonal complement and greedy decoders");
  compare->add_option("instances", compare_dirs, "Instance directories (default: generate --trials instances)")
      ->check(CLI::ExistingDirectory);
  compare_args.add_to(compare);
  compare_solve.add_to(compare);
  compare->add_option("--greedy", greedy, "Greedy variant")->check(CLI::IsMember({"omp", "romp"}))->capture_default_str();

  std::string preset;
  std::string config_path;
  bool include_m1600 = false;
  double time_budget = 0.0;
  bool no_timings = false;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo success-rate sweep");
  auto* o_preset = sweep->add_option("--preset", preset, "Figure preset")
                       ->check(CLI::IsMember(cab::experiments::preset_names()));
  auto* o_config = sweep->add_option("--config", config_path, "JSON sweep configuration")->check(CLI::ExistingFile);
  o_preset->excludes(o_config);
  sweep->add_flag("--include-m1600", include_m1600, "Add m = 1600 to the fig6 / fig8 axes");
  sweep->add_option("--time-budget", time_budget, "Skip cells estimated above this many seconds");
  sweep->add_flag("--no-timings", no_timings, "Write mean_solve_seconds as 0 for byte-stable output");
  sweep->add_flag("--quiet", quiet, "No progress output");

  cab::channel::ChannelParams cp;
  std::string bits;
  std::string text;
  std::size_t random_bits = 64;
  SolveArgs channel_solve;
  auto* channel = app.add_subcommand("channel", "Send a payload through a grossly corrupted channel");
  channel->add_option("--m", cp.m, "Ambient dimension")->capture_default_str();
  channel->add_option("--n", cp.n, "Bouquet size")->capture_default_str();
  channel->add_option("--nu", cp.nu, "Bouquet spread")->capture_default_str();
  channel->add_option("--k1", cp.k1, "Atoms per symbol")->capture_default_str();
  channel->add_option("--rho", cp.rho, "Corruption density")->capture_default_str();
  auto* o_bits = channel->add_option("--bits", bits, "Payload as a 0/1 string");
  auto* o_text = channel->add_option("--text", text, "Payload as text");
  channel->add_option("--random-bits", random_bits, "Random payload length")->capture_default_str();
  o_bits->excludes(o_text);
  channel_solve.add_to(channel);

  cab::experiments::DemoParams dp;
  auto* demo = app.add_subcommand("demo-fig4", "Trace the separator refinement on one large instance");
  demo->add_option("--m", dp.m, "Ambient dimension")->capture_default_str();
  demo->add_option("--delta", dp.delta, "n = round(delta m)")->capture_default_str();
  demo->add_option("--nu", dp.nu, "Bouquet spread")->capture_default_str();
  demo->add_option("--rho", dp.rho, "Error density")->capture_default_str();
  demo->add_option("--k1", dp.k1, "Signal support size")->capture_default_str();
  demo->add_option("--eps", dp.eps, "Protrusion margin")->capture_default_str();
  demo->add_option("--max-iter", dp.max_iter, "Refinement iteration cap")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(g, gen_args);
    if (*solve) return cmd_solve(g, solve_dir, solve_args);
    if (*certify) {
      const std::string mode = exact_only ? "exact" : iterative_only ? "iterative" : "both";
      return cmd_certify(g, cert_dir, eps, max_iter, mode, xi_c, xi_trials);
    }
    if (*compare) return cmd_compare(g, compare_dirs, compare_args, compare_solve, greedy);
    if (*sweep) {
      if (preset.empty() && config_path.empty()) throw CLI::RequiredError("--preset or --config");
      return cmd_sweep(g, preset, config_path, include_m1600, time_budget, no_timings, quiet);
    }
    if (*channel) return cmd_channel(g, cp, bits, text, random_bits, channel_solve);
    if (*demo) return cmd_demo(g, dp);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "cab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
