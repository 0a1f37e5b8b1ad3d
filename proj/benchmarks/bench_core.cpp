#include <benchmark/benchmark.h>

#include "robustam/fwht.hpp"
#include "robustam/inner_solvers.hpp"
#include "robustam/robust_am.hpp"
#include "robustam/rng.hpp"

using namespace robustam;

static void FwhtNormalized(benchmark::State& state) {
  RngStream rng(1);
  VectorXd v = rng.normal_vector(state.range(0));
  for (auto _ : state) {
    fwht_inplace(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(FwhtNormalized)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void HadamardApply(benchmark::State& state) {
  const auto op = hadamard_ensemble(state.range(0), 8, 2);
  RngStream rng(3);
  const VectorXd x = rng.normal_vector(state.range(0));
  for (auto _ : state) {
    VectorXd y = op.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(HadamardApply)->RangeMultiplier(4)->Range(64, 4096);

static void DenseApply(benchmark::State& state) {
  const Index d = state.range(0);
  const auto op = gaussian_ensemble(d, 10 * d, 4);
  RngStream rng(5);
  const VectorXd x = rng.normal_vector(d);
  for (auto _ : state) {
    VectorXd y = op.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(DenseApply)->RangeMultiplier(2)->Range(32, 256);

static void LsCacheBuild(benchmark::State& state) {
  const Index d = state.range(0);
  const auto op = gaussian_ensemble(d, 10 * d, 6);
  for (auto _ : state) {
    LsCache cache = build_ls_cache(op);
    benchmark::DoNotOptimize(&cache);
  }
}
BENCHMARK(LsCacheBuild)->RangeMultiplier(2)->Range(32, 256);

static void AdmmLadSolve(benchmark::State& state) {
  const Index d = state.range(0);
  const Index m = 10 * d;
  const auto op = gaussian_ensemble(d, m, 7);
  RngStream rng(8);
  const VectorXd c = rng.normal_vector(m);
  const LsCache cache = build_ls_cache(op);
  SignedLadProblem p;
  p.op = &op;
  p.target = c;
  p.tolerance = 1e-6 * static_cast<double>(m);
  for (auto _ : state) {
    LadSolution sol = solve_lad_admm(p, cache, {});
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(AdmmLadSolve)->Arg(32)->Arg(64)->Arg(128);

static void SpectralInit(benchmark::State& state) {
  const Index d = state.range(0);
  auto op = gaussian_ensemble(d, 10 * d, 9);
  RngStream rng(10);
  const VectorXd x_star = rng.normal_vector(d);
  OutlierSpec spec;
  spec.fraction = 0.25;
  const auto inst = synthesize_instance(std::move(op), x_star, spec, 11);
  for (auto _ : state) {
    SpectralResult res = spectral_init(inst);
    benchmark::DoNotOptimize(res.x0.data());
  }
}
BENCHMARK(SpectralInit)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
