#include <benchmark/benchmark.h>

#include <reslab/fractal.hpp>

using namespace reslab;

static void BM_BoxCountCantorSegment(benchmark::State& state) {
  const auto cloud = cantor_segment_product(static_cast<int>(state.range(0)), 1025);
  for (auto _ : state) benchmark::DoNotOptimize(box_count_randomized(cloud, 1e-2, 7));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_BoxCountCantorSegment)->Arg(4)->Arg(6)->Arg(8);

static void BM_FitDimensionCantor(benchmark::State& state) {
  const auto cloud = cantor_cloud(static_cast<int>(state.range(0)));
  const auto ladder = default_ladder(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(fit_dimension(cloud, ladder));
}
BENCHMARK(BM_FitDimensionCantor)->Arg(8)->Arg(12);

BENCHMARK_MAIN();
