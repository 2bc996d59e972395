#include <benchmark/benchmark.h>

#include <reslab/eig.hpp>
#include <reslab/openmap.hpp>

using namespace reslab;

static void BM_DenseEigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(A).eigenvalues);
  state.SetComplexityN(n);
}
BENCHMARK(BM_DenseEigenvalues)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

static void BM_OpenMapSpectrum(benchmark::State& state) {
  const auto map = build_open_map(static_cast<int>(state.range(0)), state.range(1) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(open_map_eigenvalues(map));
}
BENCHMARK(BM_OpenMapSpectrum)->ArgsProduct({{3, 4, 5}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
