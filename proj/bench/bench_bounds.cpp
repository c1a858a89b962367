// Serial reference estimator against the OpenMP kernel.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "ub/bound_engine.hpp"

namespace {

const ub::NormalizedParams kParams{0.0178, 1.0 - 1.03e-11, 2000, 2000};

void BM_Reference(benchmark::State& state) {
  const ub::McConfig mc{state.range(0), 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(ub::estimate_bounds_reference(kParams, mc));
  state.SetItemsProcessed(state.iterations() * state.range(0) * kParams.n);
}

void BM_Parallel(benchmark::State& state) {
  const ub::McConfig mc{state.range(0), 1, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(ub::estimate_bounds(kParams, mc));
  state.SetItemsProcessed(state.iterations() * state.range(0) * kParams.n);
}

void BM_ParallelSampled(benchmark::State& state) {
  const ub::McConfig mc{state.range(0), 1, static_cast<int>(state.range(1)), ub::Estimator::sampled};
  for (auto _ : state) benchmark::DoNotOptimize(ub::estimate_bounds(kParams, mc));
  state.SetItemsProcessed(state.iterations() * state.range(0) * kParams.n);
}

void worker_args(benchmark::internal::Benchmark* b) {
  for (int w = 1; w <= omp_get_num_procs(); w *= 2) b->Args({256, w});
}

}  // namespace

BENCHMARK(BM_Reference)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Apply(worker_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelSampled)->Apply(worker_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
