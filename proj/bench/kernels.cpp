// Serial reference path against the OpenMP path for each parallel kernel.
#include <benchmark/benchmark.h>

#include "pevp/analysis.hpp"
#include "pevp/chebyshev.hpp"
#include "pevp/problem.hpp"
#include "pevp/sampling.hpp"
#include "pevp/taylor.hpp"

using namespace pevp;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_TaylorExpandAll(benchmark::State& state) {
  const auto p = make_spring_chain(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(taylor_expand_all(p, 0.8, 8, {.policy = policy_of(state)}));
  }
  label(state);
}

void BM_ChebExpandAll(benchmark::State& state) {
  const auto p = make_torus_kernel(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cheb_expand_all(p, 0.25, 1.0, 10, {.policy = policy_of(state)}));
  }
  label(state);
}

void BM_ProjectCoeffs(benchmark::State& state) {
  const auto p = make_torus_kernel(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_matrix_coeffs(p, 0.25, 1.0, 20, 0, policy_of(state)));
  }
  label(state);
}

void BM_ErrorReport(benchmark::State& state) {
  const auto p = make_torus_kernel(state.range(1));
  std::vector<EigenPairSeries> series;
  for (auto& o : taylor_expand_all(p, 0.2, 10)) {
    if (o.ok()) series.push_back(*o.series);
  }
  const auto grid = linear_grid(0.1, 0.3, 101);
  for (auto _ : state) {
    benchmark::DoNotOptimize(error_report(p, series, grid, {.policy = policy_of(state)}));
  }
  label(state);
}

void BM_Sample(benchmark::State& state) {
  const auto p = make_torus_kernel(state.range(1));
  std::vector<EigenPairSeries> series;
  for (auto& o : taylor_expand_all(p, 0.2, 6)) series.push_back(*o.series);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_eigenvalues(p, series, {1, 2}, {0.2, 0.1}, 2000, 1, SampleMethod::Direct, {.policy = policy_of(state)}));
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_TaylorExpandAll)->ArgsProduct({{0, 1}, {32, 128}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChebExpandAll)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectCoeffs)->ArgsProduct({{0, 1}, {8, 32}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorReport)->ArgsProduct({{0, 1}, {8, 32}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample)->ArgsProduct({{0, 1}, {8}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
