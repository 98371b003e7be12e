#include <benchmark/benchmark.h>

#include "cab/baselines.hpp"
#include "cab/certificate.hpp"
#include "cab/model.hpp"
#include "cab/numerics.hpp"
#include "cab/solver.hpp"

namespace {

cab::model::ProblemInstance instance(std::size_t m, double rho, std::size_t k1) {
  cab::model::ModelParams p;
  p.m = m;
  p.n = m / 4;
  p.nu = 0.05;
  p.k1 = k1;
  p.rho = rho;
  p.seed = 1;
  return cab::model::synthesize(p);
}

void BM_ExtendedL1(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 0.4, 10);
  for (auto _ : state) benchmark::DoNotOptimize(cab::solver::solve_extended_l1(inst.a, inst.y));
}
BENCHMARK(BM_ExtendedL1)->Arg(100)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_OrthComplement(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 0.4, 10);
  for (auto _ : state) benchmark::DoNotOptimize(cab::baselines::orthogonal_complement_decode(inst.a, inst.y));
}
BENCHMARK(BM_OrthComplement)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Romp(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 0.3, 10);
  cab::baselines::GreedyOptions opts;
  opts.variant = cab::baselines::GreedyVariant::ROMP;
  opts.max_atoms = cab::baselines::default_max_atoms(opts.variant, inst.params.k1, inst.params.k2(),
                                                     inst.params.m, inst.params.n);
  for (auto _ : state) benchmark::DoNotOptimize(cab::baselines::greedy_decode(inst.a, inst.y, opts));
}
BENCHMARK(BM_Romp)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_QrFactorize(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  const cab::DenseMatrix a = cab::DenseMatrix::Random(m, m / 2);
  for (auto _ : state) benchmark::DoNotOptimize(cab::numerics::qr_factorize(a));
}
BENCHMARK(BM_QrFactorize)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RefineSeparator(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 0.3, 5);
  const auto prob = cab::certificate::build_separator_problem(inst.a, inst.pattern);
  for (auto _ : state) benchmark::DoNotOptimize(cab::certificate::refine_separator(prob));
}
BENCHMARK(BM_RefineSeparator)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExactVerdict(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)), 0.3, 2);
  const auto prob = cab::certificate::build_separator_problem(inst.a, inst.pattern);
  for (auto _ : state) benchmark::DoNotOptimize(cab::certificate::verify_recoverability_exact(prob));
}
BENCHMARK(BM_ExactVerdict)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_ProjectionRatio(benchmark::State& state) {
  const cab::DenseMatrix g = cab::DenseMatrix::Random(state.range(0), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cab::certificate::estimate_projection_ratio(g, 0.1, 1000, 3));
  }
}
BENCHMARK(BM_ProjectionRatio)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
