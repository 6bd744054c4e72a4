// Serial reference vs parallel kernels: expert collection, evaluation
// rollouts and retrieval scoring. Arg(0) is the serial path; Arg(1) uses
// available_threads().
#include <benchmark/benchmark.h>

#include "trajlab/harness/harness.hpp"
#include "trajlab/parallel.hpp"

using namespace trajlab;

namespace {

struct Setup {
  LabConfig config;
  Suite train = build_suite(Split::Train, config.suite, 42);
  Suite test = build_suite(Split::Test, config.suite, 42);
  MemoryStore memory = collect_memory(test.tasks, test.scenes, Split::Test, 42, config.sim);
  YesNoModel yesno = YesNoModel::random(fv::kDim, config.train.hidden, kYesNoSeed);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

int jobs_for(const benchmark::State& state) { return state.range(0) == 0 ? 1 : available_threads(); }

void BM_Collect(benchmark::State& state) {
  const auto& s = setup();
  const int jobs = jobs_for(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(collect_memory(s.train.tasks, s.train.scenes, Split::Train, 42, s.config.sim, jobs));
  state.counters["jobs"] = jobs;
}

void BM_EvaluateSimilarity(benchmark::State& state) {
  const auto& s = setup();
  const int jobs = jobs_for(state);
  const Models models{nullptr, nullptr, &s.yesno};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        evaluate(Method::RapSim, s.test.tasks, s.test.scenes, s.memory, models, s.config, 42, jobs));
  state.counters["jobs"] = jobs;
}

void BM_Retrieve(benchmark::State& state) {
  const auto& s = setup();
  const Task& task = s.test.tasks.front();
  const Observation o1 = initial_observation(s.test.scenes.at(task.scene_id), task, 42);
  Scorer scorer;
  scorer.kind = ScorerKind::YesNo;
  scorer.yesno = &s.yesno;
  const bool serial = state.range(0) == 0;
  for (auto _ : state) {
    if (serial)
      benchmark::DoNotOptimize(retrieve_serial(scorer, s.memory, task, o1));
    else
      benchmark::DoNotOptimize(retrieve(scorer, s.memory, task, o1, available_threads()));
  }
}

}  // namespace

BENCHMARK(BM_Collect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSimilarity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Retrieve)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
