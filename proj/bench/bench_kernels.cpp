// Serial vs OpenMP timings for the two data-parallel kernels.

#include <benchmark/benchmark.h>

#include "menurec/bench.hpp"
#include "menurec/models.hpp"

using namespace menurec;

namespace {

PreferenceModel mixing_model() {
  return make_linear_mix_model(6, 0.2, Matrix::uniform_mixing(6, 0.5));
}

void BM_VerifySerial(benchmark::State& state) {
  const auto model = mixing_model();
  const auto spec = ClassSpec::declared(model);
  const double res = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_class_serial(model, spec, res));
}

void BM_VerifyParallel(benchmark::State& state) {
  const auto model = mixing_model();
  const auto spec = ClassSpec::declared(model);
  const double res = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_class(model, spec, res));
}

ExperimentConfig sweep_config() {
  return ExperimentConfig::from_json(nlohmann::json::parse(R"({
    "model": {"family": "constant", "scores": [0.6, 0.3, 0.2, 0.1]},
    "k": 2, "horizon": 20000, "gamma": 0.5, "algorithm": "memoryless_exp3",
    "rewards": {"regime": "fixed", "values": [1, 0, 0, 0]},
    "benchmark": {"name": "fixed_menus"},
    "seeds": [1, 2, 3, 4, 5, 6, 7, 8], "write_traces": false
  })"));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto cfg = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(cfg));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto cfg = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}

}  // namespace

BENCHMARK(BM_VerifySerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
