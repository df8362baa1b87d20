#include <benchmark/benchmark.h>

#include "fairmix/diagnostics.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/experiments.hpp"

using namespace fairmix;

namespace {

const MixtureModel& example2_truth() {
  static const auto t = binary_mixture(100, 125, 10, 10, 0.7);
  return t;
}

const EmpiricalDistribution& example2_data() {
  static const auto d = experiment_sample(example2_truth(), 50000, 1, Binning::Grid);
  return d;
}

MixtureModel pair_truth() {
  return MixtureModel({GaussianComponent::bivariate(Point(50, 30), 15, 4, 0.3),
                       GaussianComponent::bivariate(Point(50, 30), 4, 12, -0.3)},
                      {0.5, 0.5});
}

void BM_EStepGrid(benchmark::State& state) {
  const auto& d = example2_data();
  const auto m = binary_mixture(80, 95, 7, 7, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(e_step(m, d));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.size()));
}
BENCHMARK(BM_EStepGrid);

void BM_EvaluateGrid(benchmark::State& state) {
  const auto& d = example2_data();
  const auto m = binary_mixture(80, 95, 7, 7, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(m, d));
}
BENCHMARK(BM_EvaluateGrid);

void BM_EmIteration2D(benchmark::State& state) {
  const auto d = draw_sample(pair_truth(), static_cast<std::size_t>(state.range(0)), 3);
  const MixtureModel init({GaussianComponent::bivariate(Point(30, 30), 8, 8, 0),
                           GaussianComponent::bivariate(Point(56, 31), 8, 8, 0)},
                          {0.5, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(em_iteration(init, d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmIteration2D)->Arg(1000)->Arg(50000);

void BM_RunExample2Corner(benchmark::State& state) {
  const auto alg = static_cast<Algorithm>(state.range(0));
  const auto& d = example2_data();
  const auto init = binary_mixture(80, 81, 7, 7, 0.5);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto run = run_algorithm(alg, init, d, StopSpec{}, example2_truth());
    iterations = run.iterations_used;
    benchmark::DoNotOptimize(run);
  }
  state.counters["iterations"] = static_cast<double>(iterations);
  state.SetLabel(std::string(to_string(alg)));
}
BENCHMARK(BM_RunExample2Corner)
    ->Arg(static_cast<int>(Algorithm::EM))
    ->Arg(static_cast<int>(Algorithm::E3M))
    ->Arg(static_cast<int>(Algorithm::CMEM))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
