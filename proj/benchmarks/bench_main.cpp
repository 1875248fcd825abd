#include <benchmark/benchmark.h>

#include "cointegra/fixtures.hpp"
#include "cointegra/kernel.hpp"
#include "cointegra/levy.hpp"
#include "cointegra/mcarma.hpp"
#include "cointegra/spectral.hpp"
#include "cointegra/var_oracle.hpp"

using namespace cointegra;

namespace {

void BM_KernelOu(benchmark::State& state) {
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const double step = 1.0 / double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernel(m, st, step, 10.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_KernelOu)->Arg(100)->Arg(1000);

void BM_KernelUnitDelay(benchmark::State& state) {
  const auto m = fixtures::unit_delay();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernel(m, st, 1e-3, 20.0));
}
BENCHMARK(BM_KernelUnitDelay);

void BM_KernelMcarma(benchmark::State& state) {
  const auto m = msdde_from_mcarma(fixtures::mcarma_bivariate());
  const auto st = cointegration_structure(CharacteristicFunction(m));
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernel(m, st, 1e-3, 20.0));
}
BENCHMARK(BM_KernelMcarma);

void BM_GrangerPath(benchmark::State& state) {
  const auto m = fixtures::ou_cointegrated();
  const auto st = cointegration_structure(CharacteristicFunction(m));
  const auto kernel = solve_kernel(m, st, 0.01, double(state.range(0)));
  const auto incr = sample_levy(fixtures::brownian(2), 0.01, double(state.range(0)), 10.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(granger_path(kernel, st, incr, Vec::Zero(2)));
}
BENCHMARK(BM_GrangerPath)->Arg(10)->Arg(40);

void BM_SampleLevy(benchmark::State& state) {
  const auto model = fixtures::brownian(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_levy(model, 0.01, 10.0, 50.0, 1));
}
BENCHMARK(BM_SampleLevy);

void BM_CheckConditions(benchmark::State& state) {
  const CharacteristicFunction ou(fixtures::ou_cointegrated());
  const CharacteristicFunction mc(msdde_from_mcarma(fixtures::mcarma_random()));
  const auto& cf = state.range(0) == 0 ? ou : mc;
  for (auto _ : state) benchmark::DoNotOptimize(check_conditions(cf));
}
BENCHMARK(BM_CheckConditions)->Arg(0)->Arg(1);

void BM_VarGranger(benchmark::State& state) {
  const auto m = fixtures::unit_delay();
  const auto spec = discretization_bridge(m, 0.01, 101);
  for (auto _ : state) benchmark::DoNotOptimize(var_granger(spec));
}
BENCHMARK(BM_VarGranger);

void BM_McarmaBridge(benchmark::State& state) {
  const auto spec = fixtures::mcarma_random();
  for (auto _ : state) benchmark::DoNotOptimize(msdde_from_mcarma(spec));
}
BENCHMARK(BM_McarmaBridge);

}  // namespace

BENCHMARK_MAIN();
