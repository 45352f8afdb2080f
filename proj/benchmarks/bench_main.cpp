#include <benchmark/benchmark.h>

#include "cirl/belief.hpp"
#include "cirl/demonstrators.hpp"
#include "cirl/equilibrium.hpp"
#include "cirl/harness.hpp"
#include "cirl/planning.hpp"

namespace {

cirl::GameConfig bench_config(int nf) {
  cirl::GameConfig c;
  c.num_features = nf;
  return c;
}

void BM_SoftValueIteration(benchmark::State& state) {
  const cirl::GridWorld world(bench_config(static_cast<int>(state.range(0))));
  const cirl::RewardParams theta = cirl::theta_from_seed(world.num_features(), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cirl::soft_value_iteration(world, theta, 4.0, 10));
  }
}
BENCHMARK(BM_SoftValueIteration)->Arg(3)->Arg(10);

void BM_LogPartition(benchmark::State& state) {
  const cirl::GridWorld world(bench_config(10));
  const cirl::RewardParams theta = cirl::theta_from_seed(10, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cirl::log_partition(world, theta, 4.0, 10, world.initial_state()));
  }
}
BENCHMARK(BM_LogPartition);

// Cold cache: every particle needs its own partition function.
void BM_BeliefUpdate(benchmark::State& state) {
  const cirl::GameConfig config = bench_config(3);
  const cirl::GridWorld world(config);
  const cirl::Belief prior = cirl::prior_belief(config);
  const cirl::Trajectory demo = cirl::expert_demo(world, cirl::theta_from_seed(3, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cirl::update(prior, world, demo, config.lambda));
  }
}
BENCHMARK(BM_BeliefUpdate)->Unit(benchmark::kMillisecond);

void BM_InstructiveDemo(benchmark::State& state) {
  const cirl::GridWorld world(bench_config(10));
  const cirl::DemoObjective objective =
      cirl::make_objective(world, cirl::theta_from_seed(10, 7), 4.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cirl::instructive_demo(world, objective, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_InstructiveDemo)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveJointSearch(benchmark::State& state) {
  const auto thetas = cirl::DiscretizedTheta::uniform(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cirl::exhaustive_joint_search(thetas));
}
BENCHMARK(BM_ExhaustiveJointSearch)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is built with a different LTO version.
BENCHMARK_MAIN();
