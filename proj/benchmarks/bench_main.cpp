#include <benchmark/benchmark.h>

#include "biasforge/context_builder.hpp"
#include "biasforge/fairness.hpp"
#include "biasforge/metrics.hpp"
#include "biasforge/report.hpp"
#include "biasforge/sgl.hpp"
#include "biasforge/sim_harness.hpp"
#include "spaces.hpp"

using namespace biasforge;
using namespace bftest;

namespace {

PlantedBiasModel pose_model(const FactorSpace& space) {
  PlantedBiasModel m;
  m.base_logit = 0.8;
  const auto& poses = space.at("camera_pose").values;
  for (std::size_t k = 0; k < poses.size(); ++k) m.main_effects[{"camera_pose", poses[k].id}] = 0.1 * double(k % 5);
  return m;
}

void BM_ContextUnion(benchmark::State& state) {
  const FactorSpace space = build_space({color_dim(4), position_dim(std::size_t(state.range(0)), 4),
                                         shape_dim({"cube", "cylinder", "pyramid", "sphere"}), instruction_dim(3)});
  for (auto _ : state) benchmark::DoNotOptimize(context_union(space));
}
BENCHMARK(BM_ContextUnion)->Arg(1)->Arg(4)->Arg(16);

void BM_TaskSubspace(benchmark::State& state) {
  const FactorSpace space = reference_space(0);
  for (auto _ : state) benchmark::DoNotOptimize(task_subspace(space, "color"));
}
BENCHMARK(BM_TaskSubspace)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const FactorSpace space = reference_space(24);
  const auto insts = task_subspace(space, "camera_pose");
  SimRunSpec spec{pose_model(space), insts, 50, 7, "bench", unsigned(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trials(spec));
  state.SetItemsProcessed(state.iterations() * std::int64_t(insts.size() * spec.repetitions));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_AnalyzeTrials(benchmark::State& state) {
  const FactorSpace space = reference_space(24);
  auto insts = task_subspace(space, "camera_pose");
  const auto grid = factorial_subspace(space, "camera_pose", "color",
                                       baseline_factorial_context(space, "camera_pose", "color"));
  insts.insert(insts.end(), grid.begin(), grid.end());
  const auto trials = simulate_trials({pose_model(space), insts, 20, 3, "bench", 8});
  for (auto _ : state) benchmark::DoNotOptimize(analyze_trials(trials, space, {}));
  state.SetItemsProcessed(state.iterations() * std::int64_t(trials.size()));
}
BENCHMARK(BM_AnalyzeTrials)->Unit(benchmark::kMillisecond);

void BM_ParseAdjudication(benchmark::State& state) {
  const std::string raw = R"({"analysis": "The cube and the box are both clearly visible.", "final_answer": "yes"})";
  for (auto _ : state) benchmark::DoNotOptimize(parse_adjudication(raw));
}
BENCHMARK(BM_ParseAdjudication);

void BM_GroundInstruction(benchmark::State& state) {
  std::vector<SceneObject> scene;
  const char* colors[] = {"red", "blue", "green", "yellow"};
  for (int i = 0; i < state.range(0); ++i) {
    SceneObject o;
    o.id = i + 1;
    o.object_type = i == 0 ? ObjectType::manipulation : ObjectType::other;
    o.name = "cube";
    o.category = {"cube"};
    o.color = colors[i % 4];
    o.size = SizeClass(i / 4 % 3);
    o.position = PositionClass(i / 12 % 6);
    scene.push_back(o);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ground_instruction("pick up the cube", scene));
}
BENCHMARK(BM_GroundInstruction)->Arg(3)->Arg(12)->Arg(48);

}  // namespace
BENCHMARK_MAIN();
