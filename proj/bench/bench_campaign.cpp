// Parallel vs serial differential campaign.
#include <benchmark/benchmark.h>

#include "whilesos/harness.hpp"

using namespace whilesos;

static GenConfig bench_config(bool input) {
  GenConfig g;
  g.seed = 7;
  g.input = input;
  return g;
}

static void BM_campaign_parallel(benchmark::State& st) {
  auto cfg = bench_config(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(fuzz_campaign(cfg, st.range(0), 500));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

static void BM_campaign_serial(benchmark::State& st) {
  auto cfg = bench_config(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(fuzz_campaign_serial(cfg, st.range(0), 500));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

BENCHMARK(BM_campaign_parallel)->Args({500, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_campaign_serial)->Args({500, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
