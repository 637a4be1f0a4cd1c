// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "mixlab/harness.hpp"
#include "mixlab/random_walk.hpp"
#include "mixlab/regret_batch.hpp"

namespace {

using namespace mixlab;

ReplicateContext replicate_context(std::int64_t n) {
  ExperimentConfig c;
  c.gamma = 0.1;
  c.n_grid = {n};
  c.seed = 1;
  return make_context(c, n);
}

void BM_ReplicatesSerial(benchmark::State& state) {
  const ReplicateContext ctx = replicate_context(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_serial(ctx, 2000));
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_ReplicatesOmp(benchmark::State& state) {
  const ReplicateContext ctx = replicate_context(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_omp(ctx, 2000, 0));
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_RegretSerial(benchmark::State& state) {
  const LossSpec loss = make_loss(LossKind::logit);
  for (auto _ : state) benchmark::DoNotOptimize(regret_batch_serial(loss, 4, 500, 201, 7));
}

void BM_RegretOmp(benchmark::State& state) {
  const LossSpec loss = make_loss(LossKind::logit);
  for (auto _ : state) benchmark::DoNotOptimize(regret_batch_omp(loss, 4, 500, 201, 7, 0));
}

void BM_ReflectionSerial(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reflection_count_serial(N, 3, 4));
}

void BM_ReflectionOmp(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reflection_count_omp(N, 3, 4));
}

void BM_ExcursionDp(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const std::int64_t t = tau(n, 0.5, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(excursion_probability_exact(n, t, 0.05));
}

}  // namespace

BENCHMARK(BM_ReplicatesSerial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesOmp)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegretSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegretOmp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReflectionSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReflectionOmp)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExcursionDp)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
