// Serial reference vs OpenMP kernels: simulation replications and a q̄ sweep.
#include <benchmark/benchmark.h>

#include <filesystem>

#include "gapq/cli.hpp"
#include "gapq/simulator.hpp"

using namespace gapq;

namespace {

SimConfig sim_config() {
  const auto p = PhaseProcess::two_phase(3.0, 1.0, 1.0 / 60, 1.0 / 240).with_mean_flow(420.0 / 3600);
  return {p, BehaviorModel(Behavior::B2, {{6.22, 0.9}, {14.0, 0.1}}), 50.0 / 3600, BatchDistribution::uniform(1, 7),
          3600.0, 20 * 3600.0, 16, 11};
}

cli::ExperimentSpec sweep_spec() {
  cli::ExperimentSpec s;
  s.name = "bench";
  s.kind = cli::ExperimentKind::sweep;
  s.model.phase = {{{-1.0 / 60, 1.0 / 60}, {1.0 / 240, -1.0 / 240}}, {3.0, 1.0}, 300.0};
  s.model.behavior = {Behavior::B2, {{6.22, 0.9}, {14.0, 0.1}}};
  s.model.batch = {"uniform", std::pair{1u, 7u}, {}, {}};
  s.model.lambda_bph = 50;
  s.sweep = cli::SweepSpec{cli::SweepAxis::qbar_vph, {100, 200, 300, 400, 500, 600, 700, 800}, false};
  return s;
}

void BM_SimulationSerial(benchmark::State& st) {
  const auto cfg = sim_config();
  for (auto _ : st) benchmark::DoNotOptimize(run_serial(cfg).EW.mean);
}

void BM_SimulationParallel(benchmark::State& st) {
  const auto cfg = sim_config();
  for (auto _ : st) benchmark::DoNotOptimize(run(cfg).EW.mean);
}

void sweep(benchmark::State& st, bool parallel) {
  const auto spec = sweep_spec();
  cli::RunOptions opt;
  opt.out_dir = std::filesystem::temp_directory_path() / "gapq_bench";
  opt.parallel = parallel;
  for (auto _ : st) benchmark::DoNotOptimize(cli::run_experiment(spec, opt).rows);
}

void BM_SweepSerial(benchmark::State& st) { sweep(st, false); }
void BM_SweepParallel(benchmark::State& st) { sweep(st, true); }

}  // namespace

BENCHMARK(BM_SimulationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulationParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
