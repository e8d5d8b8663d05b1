// Serial reference vs OpenMP swarm on the two objectives the toolkit runs:
// the 36-parameter prediction-error cost and the excitation objective.
#include <benchmark/benchmark.h>

#include "swarmid/cylindrical.hpp"
#include "swarmid/estimation.hpp"
#include "swarmid/pso.hpp"

namespace {

using namespace swarmid;

struct EstimationProblem {
  RobotModel model = cylindrical::robot();
  SampleSet samples;
  SearchBox box;
  Objective objective;

  EstimationProblem() {
    samples = generate_samples(model, cylindrical::true_params(), cylindrical::sampling_trajectory(), 100, 0.1, 1);
    box = ParameterRanges{}.box(3);
    objective = {box.dim(), [this](std::span<const double> x) {
                   return cost(prediction_error(model, DynamicParams::unflatten(x), samples));
                 }};
  }
};

struct PlanningProblem {
  JointConstraints cons = cylindrical::unit_constraints();
  SearchBox box = default_planner_box(cons);
  Objective objective{box.dim(), [this](std::span<const double> x) {
                        const double start[3] = {0.5, 0.5, 0.5};
                        return -excitation_objective(FourierTrajectory::from_parameters(start, x, 10.0), cons, {});
                      }};
};

PsoConfig bench_config(int threads) {
  PsoConfig c;
  c.iterations = 20;
  c.threads = threads;
  return c;
}

void BM_EstimateSerial(benchmark::State& state) {
  static EstimationProblem p;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_serial(p.objective, p.box, bench_config(1)));
}

void BM_EstimateParallel(benchmark::State& state) {
  static EstimationProblem p;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimize(p.objective, p.box, bench_config(threads)));
}

void BM_PlanSerial(benchmark::State& state) {
  static PlanningProblem p;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_serial(p.objective, p.box, bench_config(1)));
}

void BM_PlanParallel(benchmark::State& state) {
  static PlanningProblem p;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimize(p.objective, p.box, bench_config(threads)));
}

}  // namespace

BENCHMARK(BM_EstimateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EstimateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PlanSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PlanParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
