// Microbenchmarks for the hot paths: patch matching cost, one checkerboard
// sweep iteration, and Delaunay triangulation.
//
// Run manually: build/benchmarks/planarmvs_bench [--benchmark_filter=...]

#include <random>
#include <set>
#include <vector>

#include <benchmark/benchmark.h>

#include "planarmvs/delaunay.hpp"
#include "planarmvs/patchmatch.hpp"
#include "planarmvs/photometric.hpp"
#include "planarmvs/synthetic.hpp"

using namespace planarmvs;

namespace {

const SceneDataset &bench_scene() {
  static const SceneDataset scene = render_synthetic_scene(preset_textured(96, 72, 3), 3);
  return scene;
}

void BM_MatchingCost(benchmark::State &state) {
  const SceneDataset &scene = bench_scene();
  const PatchSpec spec{static_cast<int>(state.range(0)), 2};
  PlaneHypothesis theta;
  theta.depth = scene.gt_depth[1].at(48, 36);
  theta.normal = Eigen::Vector3d(0, 0, -1);
  for (auto _ : state)
    benchmark::DoNotOptimize(matching_cost({48, 36}, theta, scene.images[1], scene.images[0],
                                           scene.cameras[1], scene.cameras[0], spec));
}
BENCHMARK(BM_MatchingCost)->Arg(3)->Arg(5)->Arg(7);

void BM_SweepIteration(benchmark::State &state) {
  const SceneDataset &scene = bench_scene();
  EngineParams params;
  params.threads = static_cast<int>(state.range(0));
  params.lambda_d = 0.05;
  PatchMatchEngine engine(scene, 0, params);
  HypothesisMap map = engine.random_init(1);
  const CostContext ctx;  // photometric
  for (auto _ : state) engine.run_phase(map, ctx, 1, 1);
  state.SetItemsProcessed(state.iterations() * map.width() * map.height());
}
BENCHMARK(BM_SweepIteration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DelaunayTriangulate(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(17);
  std::set<std::pair<int, int>> uniq;
  while (static_cast<int>(uniq.size()) < n)
    uniq.insert({static_cast<int>(rng() % 2000), static_cast<int>(rng() % 1500)});
  std::vector<Eigen::Vector2i> pts;
  for (const auto &[x, y] : uniq) pts.push_back({x, y});
  for (auto _ : state) benchmark::DoNotOptimize(delaunay_triangulate(pts));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DelaunayTriangulate)->Arg(100)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
