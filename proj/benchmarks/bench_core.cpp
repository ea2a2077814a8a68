#include <benchmark/benchmark.h>

#include <vector>

#include "geocode/chamfer.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/point_cloud.hpp"
#include "geocode/programs.hpp"
#include "geocode/stability.hpp"

using namespace geocode;

namespace {

const geom::LabeledMesh& default_mesh(const char* id) {
  static const auto chair = programs::get_program("chair").graph.evaluate(programs::default_params("chair"));
  static const auto vase = programs::get_program("vase").graph.evaluate(programs::default_params("vase"));
  return std::string_view(id) == "chair" ? chair : vase;
}

void BM_EvaluateChair(benchmark::State& state) {
  const auto& p = programs::get_program("chair");
  const auto v = programs::default_params("chair");
  for (auto _ : state) benchmark::DoNotOptimize(p.graph.evaluate(v));
}
BENCHMARK(BM_EvaluateChair)->Unit(benchmark::kMillisecond);

void BM_EvaluateVase(benchmark::State& state) {
  const auto& p = programs::get_program("vase");
  const auto v = programs::default_params("vase");
  for (auto _ : state) benchmark::DoNotOptimize(p.graph.evaluate(v));
}
BENCHMARK(BM_EvaluateVase)->Unit(benchmark::kMillisecond);

void BM_SurfaceSample(benchmark::State& state) {
  const auto& m = default_mesh("chair");
  for (auto _ : state) benchmark::DoNotOptimize(pc::surface_sample(m, static_cast<std::size_t>(state.range(0)), 1));
}
BENCHMARK(BM_SurfaceSample)->Arg(2048)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = pc::surface_sample(default_mesh("chair"), n, 1);
  const auto b = pc::surface_sample(default_mesh("chair"), n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(2048)->Arg(32768)->Unit(benchmark::kMillisecond);

void BM_Fps(benchmark::State& state) {
  const auto cloud = pc::surface_sample(default_mesh("chair"), 20000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pc::fps(cloud.points, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Fps)->Arg(256)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_TrainingClouds(benchmark::State& state) {
  const auto& m = default_mesh("chair");
  for (auto _ : state) benchmark::DoNotOptimize(pc::make_training_clouds(m, 5));
}
BENCHMARK(BM_TrainingClouds)->Unit(benchmark::kMillisecond);

void BM_Stability(benchmark::State& state) {
  const auto& m = default_mesh(state.range(0) ? "vase" : "chair");
  for (auto _ : state) benchmark::DoNotOptimize(metrics::stability(m));
}
BENCHMARK(BM_Stability)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WriteObj(benchmark::State& state) {
  const auto& m = default_mesh("chair");
  for (auto _ : state) benchmark::DoNotOptimize(geom::write_obj(m));
}
BENCHMARK(BM_WriteObj)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
