#include <benchmark/benchmark.h>

#include "blobtrack/blobtrack.hpp"

namespace {

using namespace blobtrack;

// About 30k source vertices, 118k after one refinement level.
SyntheticSpec desk_spec(std::size_t frames) {
  SyntheticSpec spec;
  spec.spacing = 0.007;
  spec.frames = frames;
  return spec;
}

struct Scenario {
  SyntheticData data = generate_synthetic(desk_spec(8));
  MemorySource source{data.container};
  std::vector<Frame> baseline = source.load(1);
  std::vector<Frame> frame = source.load(5);
  FrameProcessor processor{source.mesh(), baseline, std::nullopt, Parameters{}};
};

const Scenario& scenario() {
  static const Scenario s;
  return s;
}

void BM_BuildEdges(benchmark::State& state) {
  const auto& mesh = scenario().source.mesh();
  for (auto _ : state) benchmark::DoNotOptimize(build_edges(mesh));
}
BENCHMARK(BM_BuildEdges)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const auto& mesh = scenario().source.mesh();
  for (auto _ : state) benchmark::DoNotOptimize(Refinement(mesh, 1));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

void BM_RefineApply(benchmark::State& state) {
  const auto& s = scenario();
  const Refinement refinement(s.source.mesh(), 1);
  const auto normalized = normalize(s.frame[0].values, s.baseline[0].values);
  for (auto _ : state) benchmark::DoNotOptimize(refinement.apply(normalized));
  state.counters["vertices"] = static_cast<double>(refinement.mesh().vertex_count());
}
BENCHMARK(BM_RefineApply)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const auto& s = scenario();
  const auto field = Refinement(s.source.mesh(), 1).apply(normalize(s.frame[0].values, s.baseline[0].values));
  for (auto _ : state) benchmark::DoNotOptimize(detect_normalized(field, DetectionParams{}));
}
BENCHMARK(BM_Detect)->Unit(benchmark::kMillisecond);

void BM_Label(benchmark::State& state) {
  const auto& s = scenario();
  const auto field = Refinement(s.source.mesh(), 1).apply(normalize(s.frame[0].values, s.baseline[0].values));
  const auto detection = detect_normalized(field, DetectionParams{});
  const auto& mesh = s.processor.analysis_mesh();
  for (auto _ : state) benchmark::DoNotOptimize(label_components(mesh, detection.set.candidates));
  state.counters["candidates"] = static_cast<double>(detection.set.candidate_count);
}
BENCHMARK(BM_Label)->Unit(benchmark::kMillisecond);

void BM_ProcessFrame(benchmark::State& state) {
  const auto& s = scenario();
  for (auto _ : state) benchmark::DoNotOptimize(s.processor.process(s.frame));
  state.counters["vertices"] = static_cast<double>(s.processor.analysis_mesh().vertex_count());
}
BENCHMARK(BM_ProcessFrame)->Unit(benchmark::kMillisecond);

void BM_Run(benchmark::State& state) {
  const auto& s = scenario();
  const ReplicatedSource source(s.source, 33);
  RunConfig config;
  config.workers = static_cast<std::size_t>(state.range(0));
  config.t_start = 2;
  for (auto _ : state) benchmark::DoNotOptimize(run(config, source));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Run)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
