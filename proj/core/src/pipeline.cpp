#include "planarmvs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <utility>

#include "planarmvs/errors.hpp"

namespace planarmvs {

namespace {

// Random-stream tags per phase; geometric rounds advance the tag so no
// refinement stream is ever reused.
constexpr std::uint64_t kTagPhotometric = 1;
constexpr std::uint64_t kTagPlanar = 2;
constexpr std::uint64_t kTagGeometricBase = 3;

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming> &sink) : sink_(&sink) {}

  void start(std::string name) {
    name_ = std::move(name);
    begin_ = std::chrono::steady_clock::now();
  }

  void stop() {
    const auto end = std::chrono::steady_clock::now();
    sink_->push_back({name_, std::chrono::duration<double>(end - begin_).count()});
  }

 private:
  std::vector<StageTiming> *sink_;
  std::string name_;
  std::chrono::steady_clock::time_point begin_;
};

DepthMap downscale_depth_nearest(const DepthMap &d, int factor) {
  const int w = std::max(1, d.width() / factor);
  const int h = std::max(1, d.height() / factor);
  DepthMap out(w, h, 0.0f);
  // Pixel centers of the downscaled grid sit at x*factor + (factor-1)/2 in
  // the source; round down to the nearest stored sample.
  const int off = (factor - 1) / 2;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = d.at(std::min(x * factor + off, d.width() - 1),
                          std::min(y * factor + off, d.height() - 1));
  return out;
}

}  // namespace

EngineParams engine_params(const PipelineConfig &config, const CameraModel &cam) {
  EngineParams ep;
  ep.patch = PatchSpec{config.patch_radius, config.patch_step};
  ep.sigma = config.sigma;
  ep.eta = config.eta;
  ep.alpha = config.alpha;
  ep.gamma = config.gamma;
  ep.lambda_d = (cam.depth_max - cam.depth_min) / config.lambda_d_divisor;
  ep.lambda_n = config.lambda_n_deg * std::numbers::pi / 180.0;
  ep.top_k = config.top_k;
  ep.threads = config.resolved_threads();
  ep.seed = config.seed;
  return ep;
}

SceneDataset downscale_scene(const SceneDataset &scene, int max_dim) {
  if (max_dim <= 0) return scene;
  int largest = 0;
  for (const auto &img : scene.images) largest = std::max({largest, img.width(), img.height()});
  if (largest <= max_dim) return scene;
  const int factor = (largest + max_dim - 1) / max_dim;

  SceneDataset out;
  out.images.reserve(scene.images.size());
  out.cameras.reserve(scene.cameras.size());
  for (std::size_t i = 0; i < scene.images.size(); ++i) {
    out.images.push_back(downscale(scene.images[i], factor));
    CameraModel cam = scene.cameras[i];
    const double off = (factor - 1) / 2.0;  // new pixel center in old coords: x*f + off
    cam.fx /= factor;
    cam.fy /= factor;
    cam.cx = (cam.cx - off) / factor;
    cam.cy = (cam.cy - off) / factor;
    cam.width = out.images.back().width();
    cam.height = out.images.back().height();
    out.cameras.push_back(cam);
  }
  for (const auto &img : scene.rgb) out.rgb.push_back(downscale(img, factor));
  for (const auto &d : scene.gt_depth) out.gt_depth.push_back(downscale_depth_nearest(d, factor));
  out.validate();
  return out;
}

PipelineResult run_pipeline(const SceneDataset &scene_in, const PipelineConfig &config) {
  config.validate();
  const SceneDataset scene = downscale_scene(scene_in, config.max_dim);
  scene.validate();
  const int n_views = scene.view_count();

  PipelineResult result;
  result.prior_used.assign(n_views, false);
  StageClock clock(result.timings);

  std::vector<PatchMatchEngine> engines;
  engines.reserve(n_views);
  for (int i = 0; i < n_views; ++i)
    engines.emplace_back(scene, i, engine_params(config, scene.cameras[i]));

  // Photometric sweeps from random fields (one per view).
  clock.start("photometric");
  std::vector<HypothesisMap> maps;
  maps.reserve(n_views);
  for (int i = 0; i < n_views; ++i) {
    HypothesisMap map = engines[i].random_init(kTagPhotometric);
    engines[i].run_phase(map, CostContext{CostModel::kPhoto}, config.t_photo, kTagPhotometric);
    maps.push_back(std::move(map));
  }
  clock.stop();

  // Credible correspondences -> triangulation -> per-view planar prior, then
  // the prior-assisted sweep from a fresh random field.
  if (config.use_prior) {
    clock.start("prior");
    std::vector<PriorModel> priors(n_views);
    result.triangulations.resize(n_views);
    for (int i = 0; i < n_views; ++i) {
      try {
        const CredibleSet credible = select_credible(maps[i], config.epsilon);
        result.triangulations[i] = triangulate_credible(credible);
        priors[i] = build_prior_model(result.triangulations[i], scene.cameras[i]);
        result.prior_used[i] = true;
      } catch (const InsufficientSupportError &e) {
        result.warnings.push_back("view " + std::to_string(i) +
                                  ": insufficient credible support (" + e.what() +
                                  "); keeping photometric estimates");
      }
    }
    clock.stop();

    clock.start("planar");
    for (int i = 0; i < n_views; ++i) {
      if (!result.prior_used[i]) continue;
      CostContext ctx;
      ctx.model = CostModel::kPriorPhoto;
      ctx.prior = &priors[i];
      HypothesisMap map = engines[i].random_init(kTagPlanar);
      engines[i].run_phase(map, ctx, config.t_p_photo, kTagPlanar);
      maps[i] = std::move(map);
    }
    clock.stop();
  }

  // Geometric-consistency rounds: every view is swept against the other
  // views' depth maps, frozen at the start of the round.
  if (config.use_geom) {
    clock.start("geometric");
    for (int round = 0; round < config.geom_rounds; ++round) {
      std::vector<DepthMap> snapshot;
      snapshot.reserve(n_views);
      for (int i = 0; i < n_views; ++i) snapshot.push_back(maps[i].depth_map());
      for (int i = 0; i < n_views; ++i) {
        GeomContext geom;
        geom.lambda_geo = config.lambda_geo;
        geom.tau_geo = config.tau_geo;
        for (const int j : engines[i].source_indices()) geom.src_depths.push_back(&snapshot[j]);
        CostContext ctx;
        ctx.model = CostModel::kGeometric;
        ctx.geom = &geom;
        engines[i].run_phase(maps[i], ctx, config.t_geo,
                             kTagGeometricBase + static_cast<std::uint64_t>(round));
      }
    }
    clock.stop();
  }

  result.depth.reserve(n_views);
  result.normal.reserve(n_views);
  result.cost.reserve(n_views);
  for (int i = 0; i < n_views; ++i) {
    result.depth.push_back(maps[i].depth_map());
    result.normal.push_back(maps[i].normal_map());
    result.cost.push_back(maps[i].cost_map());
  }

  clock.start("fusion");
  result.cloud = fuse(result.depth, result.normal, scene.cameras, config.fusion, &scene.images,
                      scene.rgb.empty() ? nullptr : &scene.rgb);
  clock.stop();
  return result;
}

}  // namespace planarmvs
