#include <benchmark/benchmark.h>

#include <reslab/flow.hpp>
#include <reslab/model.hpp>

using namespace reslab;

static void BM_IntegrateDoubleBarrier(benchmark::State& state) {
  const auto model = HamiltonianModel::schrodinger(Potential::double_barrier());
  const auto rho = PhasePoint::make1(0.0, 1.0);
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(model, rho, 0.0, T, 1e-10));
}
BENCHMARK(BM_IntegrateDoubleBarrier)->Arg(5)->Arg(20)->Arg(80);

static void BM_EscapeRecordThreeBump(benchmark::State& state) {
  const auto model = HamiltonianModel::schrodinger(Potential::three_bump());
  const auto rho = PhasePoint::make2(0.0, 0.0, 1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(escape_record(model, rho, 6.0, 40.0));
}
BENCHMARK(BM_EscapeRecordThreeBump);

BENCHMARK_MAIN();
