#include "cab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cab/baselines.hpp"
#include "cab/rng.hpp"

namespace cab::experiments {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr double kFlopsPerSecond = 1e10;

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr MethodName kMethodNames[] = {
    {Method::ExtendedL1, "ExtendedL1"},
    {Method::OrthComplement, "OrthComplement"},
    {Method::OMP, "OMP"},
    {Method::ROMP, "ROMP"},
    {Method::CertificateExact, "CertificateExact"},
    {Method::CertificateIterative, "CertificateIterative"},
};

std::vector<double> rho_axis(bool with_zero) {
  std::vector<double> out;
  if (with_zero) out.push_back(0.0);
  for (int i = 1; i <= 19; ++i) out.push_back(i / 20.0);
  return out;
}

std::vector<std::size_t> fig6_m_axis(const PresetOptions& opts) {
  std::vector<std::size_t> m = {100, 200, 400, 800};
  if (opts.include_m1600) m.push_back(1600);
  return m;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string describe_cell(const model::ModelParams& p) {
  std::ostringstream os;
  os << "m=" << p.m << " n=" << p.n << " nu=" << p.nu << " rho=" << p.rho << " k1=" << p.k1;
  return os.str();
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& entry : kMethodNames) {
    if (entry.method == m) return entry.name;
  }
  return "Unknown";
}

Method method_from_string(std::string_view name) {
  for (const auto& entry : kMethodNames) {
    if (entry.name == name) return entry.method;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

K1Rule K1Rule::fixed(std::size_t k) {
  K1Rule r;
  r.kind = Kind::Fixed;
  r.k = k;
  return r;
}

K1Rule K1Rule::sqrt_m() {
  K1Rule r;
  r.kind = Kind::SqrtM;
  return r;
}

K1Rule K1Rule::frac_m(double fraction) {
  K1Rule r;
  r.kind = Kind::FracM;
  r.fraction = fraction;
  return r;
}

K1Rule K1Rule::wpg(double c0, double eta0) {
  K1Rule r;
  r.kind = Kind::WPG;
  r.c0 = c0;
  r.eta0 = eta0;
  return r;
}

std::size_t K1Rule::resolve(std::size_t m, std::size_t n) const {
  const double md = static_cast<double>(m);
  double raw = 1.0;
  switch (kind) {
    case Kind::Fixed: raw = static_cast<double>(k); break;
    case Kind::SqrtM: raw = std::round(std::sqrt(md)); break;
    case Kind::FracM: raw = std::round(fraction * md); break;
    case Kind::WPG: raw = std::round(c0 * std::pow(md, 1.0 - eta0)); break;
  }
  const auto k1 = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(k1, std::max<std::size_t>(n, 1));
}

std::string K1Rule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Fixed: os << "fixed(" << k << ")"; break;
    case Kind::SqrtM: os << "sqrt_m"; break;
    case Kind::FracM: os << "frac_m(" << fraction << ")"; break;
    case Kind::WPG: os << "wpg(" << c0 << "," << eta0 << ")"; break;
  }
  return os.str();
}

void SweepConfig::validate() const {
  if (m_values.empty() || nu_values.empty() || rho_values.empty()) {
    throw std::invalid_argument("SweepConfig: grid is empty");
  }
  if (n_values.empty() == delta_values.empty()) {
    throw std::invalid_argument("SweepConfig: give exactly one of n / delta axes");
  }
  if (methods.empty()) throw std::invalid_argument("SweepConfig: no methods");
  if (trials_per_cell < 1) throw std::invalid_argument("SweepConfig: trials_per_cell must be >= 1");
  if (k1_rule.kind == K1Rule::Kind::FracM && !(k1_rule.fraction > 0.0 && k1_rule.fraction < 1.0)) {
    throw std::invalid_argument("SweepConfig: FracM fraction must lie in (0, 1)");
  }
  if (k1_rule.kind == K1Rule::Kind::Fixed && k1_rule.k < 1) {
    throw std::invalid_argument("SweepConfig: Fixed k1 must be >= 1");
  }
  if (k1_rule.kind == K1Rule::Kind::WPG && !(k1_rule.c0 > 0.0 && k1_rule.eta0 > 0.0 && k1_rule.eta0 < 1.0)) {
    throw std::invalid_argument("SweepConfig: WPG needs c0 > 0 and eta0 in (0, 1)");
  }
  for (double d : delta_values) {
    if (!(d > 0.0)) throw std::invalid_argument("SweepConfig: delta must be > 0");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("SweepConfig: eps must lie in (0, 1)");
  solve.validate();
  for (const auto& p : grid()) p.validate();
}

std::vector<model::ModelParams> SweepConfig::grid() const {
  std::vector<model::ModelParams> cells;
  for (std::size_t m : m_values) {
    std::vector<std::size_t> ns = n_values;
    if (ns.empty()) {
      for (double d : delta_values) {
        ns.push_back(static_cast<std::size_t>(std::llround(d * static_cast<double>(m))));
      }
    }
    for (std::size_t n : ns) {
      for (double nu : nu_values) {
        for (double rho : rho_values) {
          model::ModelParams p;
          p.m = m;
          p.n = n;
          p.nu = nu;
          p.c_mu = c_mu;
          p.rho = rho;
          p.k1 = k1_rule.resolve(m, n);
          cells.push_back(p);
        }
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t cell, std::size_t trial) {
  return derive_seed(base_seed, cell, trial);
}

double estimate_cell_seconds(const model::ModelParams& cell, const std::vector<Method>& methods,
                             std::size_t trials) {
  const double m = static_cast<double>(cell.m);
  const double n = static_cast<double>(cell.n);
  const double atoms = static_cast<double>(cell.k1 + cell.k2());
  const double p = std::max(m + n - atoms, 1.0);
  constexpr double kIpmIterations = 15.0;
  double flops = 0.0;
  for (Method method : methods) {
    switch (method) {
      case Method::ExtendedL1:
        flops += kIpmIterations * (m * m * n + m * m * m / 3.0);
        break;
      case Method::OrthComplement: {
        const double r = std::max(m - n, 1.0);
        flops += 2.0 * m * m * n + kIpmIterations * (r * r * m + r * r * r / 3.0);
        break;
      }
      case Method::OMP:
      case Method::ROMP:
        flops += atoms * m * (n + m) * 2.0;
        break;
      case Method::CertificateExact: {
        const double rows = n + p;
        flops += 2.0 * p * n * n + 1.5 * kIpmIterations * (rows * rows * 3.0 * p + rows * rows * rows / 3.0);
        break;
      }
      case Method::CertificateIterative:
        flops += 2.0 * p * n * n + 20.0 * 4.0 * p * n;
        break;
    }
  }
  return flops * static_cast<double>(trials) / kFlopsPerSecond;
}

TrialOutcome run_method(Method method, const model::ProblemInstance& inst, const SweepConfig& config) {
  TrialOutcome out;
  const auto t0 = Clock::now();
  const double threshold = config.solve.success_threshold;
  switch (method) {
    case Method::ExtendedL1: {
      const auto sol = solver::solve_extended_l1(inst.a, inst.y, config.solve);
      out.success = solver::judge_success(sol, inst, threshold);
      out.iterations = static_cast<double>(sol.iterations);
      break;
    }
    case Method::OrthComplement: {
      const auto sol = baselines::orthogonal_complement_decode(inst.a, inst.y, config.solve);
      out.success = solver::judge_success(sol, inst, threshold);
      out.iterations = static_cast<double>(sol.iterations);
      break;
    }
    case Method::OMP:
    case Method::ROMP: {
      baselines::GreedyOptions go;
      go.variant = method == Method::OMP ? baselines::GreedyVariant::OMP : baselines::GreedyVariant::ROMP;
      go.max_atoms = baselines::default_max_atoms(go.variant, inst.params.k1, inst.params.k2(), inst.params.m,
                                                  inst.params.n);
      const auto g = baselines::greedy_decode(inst.a, inst.y, go);
      out.success = solver::judge_success(g.solution, inst, threshold);
      out.iterations = static_cast<double>(g.solution.iterations);
      break;
    }
    case Method::CertificateExact:
    case Method::CertificateIterative: {
      try {
        const auto prob = certificate::build_separator_problem(inst.a, inst.pattern, config.eps);
        if (method == Method::CertificateExact) {
          const auto v = certificate::verify_recoverability_exact(prob);
          out.success = v.recoverable;
          out.iterations = static_cast<double>(v.lp_iterations);
        } else {
          certificate::RefineOptions ro;
          ro.max_iter = config.certificate_max_iter;
          const auto c = certificate::refine_separator(prob, ro);
          out.success = c.converged;
          out.iterations = static_cast<double>(c.iterations);
        }
      } catch (const RankDeficient&) {
        // Fewer clean rows than signal atoms: the pattern is not recoverable.
        out.success = false;
      }
      break;
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const SweepHooks& hooks) {
  config.validate();
  const std::vector<model::ModelParams> cells = config.grid();
  const std::size_t methods = config.methods.size();
  const std::size_t trials = config.trials_per_cell;
  std::size_t jobs = config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.jobs;

  std::mutex log_mutex;
  const auto log = [&](const std::string& msg) {
    if (!hooks.log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    hooks.log(msg);
  };

  std::vector<bool> skipped(cells.size(), false);
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (config.cell_time_budget_seconds > 0.0) {
      const double est = estimate_cell_seconds(cells[c], config.methods, trials) / static_cast<double>(jobs);
      if (est > config.cell_time_budget_seconds) {
        skipped[c] = true;
        std::ostringstream os;
        os << "skipped cell " << describe_cell(cells[c]) << ": estimated " << est << " s exceeds budget "
           << config.cell_time_budget_seconds << " s";
        log(os.str());
        continue;
      }
    }
    active.push_back(c);
  }

  // outcomes[(cell * trials + trial) * methods + method]
  std::vector<TrialOutcome> outcomes(cells.size() * trials * methods);
  const std::size_t total = active.size() * trials;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t cell = active[task / trials];
      const std::size_t trial = task % trials;
      model::ModelParams params = cells[cell];
      params.seed = trial_seed(config.base_seed, cell, trial);
      TrialOutcome* slot = &outcomes[(cell * trials + trial) * methods];
      try {
        const model::ProblemInstance inst = model::synthesize(params);
        for (std::size_t k = 0; k < methods; ++k) {
          try {
            slot[k] = run_method(config.methods[k], inst, config);
          } catch (const std::exception& e) {
            slot[k] = TrialOutcome{};
            log("trial failed: " + describe_cell(params) + " trial=" + std::to_string(trial) + " method=" +
                std::string(to_string(config.methods[k])) + ": " + e.what());
          }
        }
      } catch (const std::exception& e) {
        log("instance synthesis failed: " + describe_cell(params) + ": " + e.what());
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (hooks.progress) hooks.progress(finished, total);
    }
  };

  jobs = std::min(jobs, std::max<std::size_t>(total, 1));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<SweepRecord> records;
  records.reserve(cells.size() * methods);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < methods; ++k) {
      SweepRecord r;
      r.m = cells[c].m;
      r.n = cells[c].n;
      r.nu = cells[c].nu;
      r.rho = cells[c].rho;
      r.k1 = cells[c].k1;
      r.k2 = cells[c].k2();
      r.method = config.methods[k];
      if (!skipped[c]) {
        r.trials = trials;
        double seconds = 0.0;
        double iterations = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
          const TrialOutcome& o = outcomes[(c * trials + t) * methods + k];
          r.successes += o.success ? 1 : 0;
          seconds += o.seconds;
          iterations += o.iterations;
        }
        r.mean_solve_seconds = config.record_timings ? seconds / static_cast<double>(trials) : 0.0;
        r.mean_iterations = iterations / static_cast<double>(trials);
      }
      records.push_back(r);
    }
  }
  return records;
}

std::vector<std::string> preset_names() {
  return {"fig5", "fig6_left", "fig6_right", "fig7_left", "fig7_right", "fig8"};
}

SweepConfig figure_preset(std::string_view name, const PresetOptions& opts) {
  SweepConfig c;
  c.preset = std::string(name);
  c.paper_trials = 500;
  c.trials_per_cell = 100;
  c.nu_values = {0.05};
  c.methods = {Method::ExtendedL1};
  if (name == "fig5") {
    c.m_values = {500};
    c.delta_values = {0.25};
    c.k1_rule = K1Rule::fixed(15);
    c.rho_values = rho_axis(true);
    c.methods = {Method::ExtendedL1, Method::OrthComplement, Method::ROMP};
  } else if (name == "fig6_left" || name == "fig6_right") {
    c.m_values = fig6_m_axis(opts);
    c.delta_values = {0.25};
    c.k1_rule = name == "fig6_left" ? K1Rule::fixed(1) : K1Rule::sqrt_m();
    c.rho_values = rho_axis(false);
  } else if (name == "fig7_left") {
    c.m_values = {400};
    c.n_values = {100, 200, 300, 400, 500};
    c.nu_values = {0.3};
    c.k1_rule = K1Rule::sqrt_m();
    c.rho_values = rho_axis(false);
  } else if (name == "fig7_right") {
    c.m_values = {400};
    c.n_values = {200};
    c.nu_values = {0.1, 0.3, 0.5, 0.7, 0.9};
    c.k1_rule = K1Rule::sqrt_m();
    c.rho_values = rho_axis(false);
  } else if (name == "fig8") {
    c.m_values = fig6_m_axis(opts);
    c.delta_values = {0.25};
    c.k1_rule = K1Rule::frac_m(0.05);
    c.rho_values = rho_axis(false);
  } else {
    throw std::invalid_argument("unknown preset: " + std::string(name));
  }
  return c;
}

namespace {

template <typename T>
std::vector<T> read_axis(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

K1Rule parse_k1_rule(const json& j) {
  if (j.is_number_unsigned()) return K1Rule::fixed(j.get<std::size_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "sqrt_m") return K1Rule::sqrt_m();
    throw std::invalid_argument("k1_rule: unknown rule " + s);
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "fixed") return K1Rule::fixed(j.at("k").get<std::size_t>());
  if (kind == "sqrt_m") return K1Rule::sqrt_m();
  if (kind == "frac_m") return K1Rule::frac_m(j.at("fraction").get<double>());
  if (kind == "wpg") return K1Rule::wpg(j.at("c0").get<double>(), j.at("eta0").get<double>());
  throw std::invalid_argument("k1_rule: unknown kind " + kind);
}

json k1_rule_json(const K1Rule& r) {
  switch (r.kind) {
    case K1Rule::Kind::Fixed: return {{"kind", "fixed"}, {"k", r.k}};
    case K1Rule::Kind::SqrtM: return {{"kind", "sqrt_m"}};
    case K1Rule::Kind::FracM: return {{"kind", "frac_m"}, {"fraction", r.fraction}};
    case K1Rule::Kind::WPG: return {{"kind", "wpg"}, {"c0", r.c0}, {"eta0", r.eta0}};
  }
  return {};
}

}  // namespace

SweepConfig sweep_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("sweep config: expected a JSON object");

  static const char* const kKeys[] = {"preset", "include_m1600", "m", "n", "delta", "nu", "rho", "k1_rule",
                                      "c_mu", "methods", "trials", "base_seed", "eps", "certificate_max_iter",
                                      "success_threshold", "max_iterations", "time_budget_seconds", "jobs",
                                      "paper_trials"};
  for (const auto& item : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), item.key()) == std::end(kKeys)) {
      throw std::invalid_argument("sweep config: unknown key '" + item.key() + "'");
    }
  }

  try {
    SweepConfig c;
    if (j.contains("preset")) {
      PresetOptions po;
      po.include_m1600 = j.value("include_m1600", false);
      c = figure_preset(j.at("preset").get<std::string>(), po);
    } else {
      c.trials_per_cell = 100;
      c.nu_values = {0.05};
      c.methods = {Method::ExtendedL1};
    }
    if (j.contains("m")) c.m_values = read_axis<std::size_t>(j, "m");
    if (j.contains("n")) {
      c.n_values = read_axis<std::size_t>(j, "n");
      c.delta_values.clear();
    }
    if (j.contains("delta")) {
      c.delta_values = read_axis<double>(j, "delta");
      c.n_values.clear();
    }
    if (j.contains("nu")) c.nu_values = read_axis<double>(j, "nu");
    if (j.contains("rho")) c.rho_values = read_axis<double>(j, "rho");
    if (j.contains("k1_rule")) c.k1_rule = parse_k1_rule(j.at("k1_rule"));
    if (j.contains("c_mu")) c.c_mu = j.at("c_mu").get<double>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& name : j.at("methods")) c.methods.push_back(method_from_string(name.get<std::string>()));
    }
    if (j.contains("trials")) c.trials_per_cell = j.at("trials").get<std::size_t>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("certificate_max_iter")) c.certificate_max_iter = j.at("certificate_max_iter").get<std::size_t>();
    if (j.contains("success_threshold")) c.solve.success_threshold = j.at("success_threshold").get<double>();
    if (j.contains("max_iterations")) c.solve.max_iterations = j.at("max_iterations").get<std::size_t>();
    if (j.contains("time_budget_seconds")) c.cell_time_budget_seconds = j.at("time_budget_seconds").get<double>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<std::size_t>();
    if (j.contains("paper_trials")) c.paper_trials = j.at("paper_trials").get<std::size_t>();
    if (!j.contains("preset")) c.preset = "custom";
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
}

std::string sweep_config_to_json(const SweepConfig& c) {
  json j;
  j["m"] = c.m_values;
  if (!c.n_values.empty()) j["n"] = c.n_values;
  if (!c.delta_values.empty()) j["delta"] = c.delta_values;
  j["nu"] = c.nu_values;
  j["rho"] = c.rho_values;
  j["k1_rule"] = k1_rule_json(c.k1_rule);
  j["c_mu"] = c.c_mu;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["trials"] = c.trials_per_cell;
  j["base_seed"] = c.base_seed;
  j["eps"] = c.eps;
  j["certificate_max_iter"] = c.certificate_max_iter;
  j["success_threshold"] = c.solve.success_threshold;
  j["max_iterations"] = c.solve.max_iterations;
  j["time_budget_seconds"] = c.cell_time_budget_seconds;
  j["jobs"] = c.jobs;
  j["paper_trials"] = c.paper_trials;
  return j.dump(2);
}

DemoResult run_certificate_demo(const DemoParams& dp, const std::filesystem::path& out_dir) {
  DemoResult result;
  model::ModelParams& p = result.params;
  p.m = dp.m;
  p.n = static_cast<std::size_t>(std::llround(dp.delta * static_cast<double>(dp.m)));
  p.nu = dp.nu;
  p.rho = dp.rho;
  p.k1 = dp.k1;
  p.seed = dp.seed;
  p.validate();

  const model::ProblemInstance inst = model::synthesize(p);
  const auto prob = certificate::build_separator_problem(inst.a, inst.pattern, dp.eps);

  std::vector<DenseVector> iterates;
  certificate::RefineOptions ro;
  ro.max_iter = dp.max_iter;
  result.certificate = certificate::refine_separator(
      prob, ro, [&](std::size_t, const DenseVector& q) { iterates.push_back(q.cwiseAbs()); });
  certificate::DiagnosticsOptions diag;
  diag.seed = derive_seed(dp.seed, 7);
  result.diagnostics = certificate::measure_diagnostics(inst, prob, diag);

  if (out_dir.empty()) return result;
  std::filesystem::create_directories(out_dir);
  const auto open = [&](const char* name) {
    std::ofstream os(out_dir / name);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / name).string());
    os.precision(17);
    return os;
  };

  {
    auto os = open("profiles.csv");
    os << "iteration,rank,abs_q\n";
    for (std::size_t k = 0; k < iterates.size(); ++k) {
      std::vector<double> v(iterates[k].data(), iterates[k].data() + iterates[k].size());
      std::sort(v.begin(), v.end(), std::greater<>());
      for (std::size_t r = 0; r < v.size(); ++r) os << k << ',' << r << ',' << v[r] << '\n';
    }
  }
  const auto& cert = result.certificate;
  {
    auto os = open("trace.csv");
    os << "iteration,theta_norm,violations,invalid,inf_norm\n";
    for (std::size_t k = 0; k < cert.theta_norms.size(); ++k) {
      os << k << ',' << cert.theta_norms[k] << ',' << cert.violation_counts[k] << ',' << cert.invalid_counts[k] << ','
         << cert.inf_norms[k] << '\n';
    }
  }
  {
    json s;
    s["m"] = p.m;
    s["n"] = p.n;
    s["nu"] = p.nu;
    s["rho"] = p.rho;
    s["k1"] = p.k1;
    s["k2"] = p.k2();
    s["eps"] = dp.eps;
    s["seed"] = dp.seed;
    s["p"] = prob.p();
    s["converged"] = cert.converged;
    s["stalled"] = cert.stalled;
    s["iterations"] = cert.iterations;
    s["q_inf_norm"] = cert.q_inf_norm;
    s["constraint_residual"] = cert.constraint_residual;
    s["violation_counts"] = cert.violation_counts;
    s["invalid_counts"] = cert.invalid_counts;
    s["theta_norms"] = cert.theta_norms;
    const auto& d = result.diagnostics;
    s["q0_norm"] = d.q0_norm;
    s["theta_q0_norm"] = d.theta_q0_norm;
    s["q0_norm_over_sqrt_m"] = d.q0_norm_over_sqrt_m;
    s["theta_q0_norm_over_sqrt_m"] = d.theta_q0_norm_over_sqrt_m;
    s["mu_jc_norm_sq"] = d.mu_jc_norm_sq;
    s["xi_hat"] = d.xi.xi_hat;
    s["xi_k"] = d.xi.k;
    s["xi_trials"] = d.xi.trials;
    s["xi_lower_bound"] = d.xi.lower_bound;
    auto os = open("summary.json");
    os << s.dump(2) << '\n';
  }
  return result;
}

}  // namespace cab::experiments
