#pragma once

#include <string>
#include <vector>

#include "planarmvs/config.hpp"
#include "planarmvs/dataset.hpp"
#include "planarmvs/patchmatch.hpp"
#include "planarmvs/ply.hpp"
#include "planarmvs/prior.hpp"

namespace planarmvs {

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct PipelineResult {
  std::vector<DepthMap> depth;     // final estimate per view
  std::vector<NormalMap> normal;
  std::vector<DepthMap> cost;      // final aggregated cost per view
  PointCloud cloud;
  std::vector<Triangulation> triangulations;  // per view; empty when no prior
  std::vector<bool> prior_used;               // per view
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
};

// Builds engine parameters for one reference view from the global config
// (lambda_d derived from the view's own depth range).
EngineParams engine_params(const PipelineConfig &config, const CameraModel &cam);

// Integer-factor downscale of a whole scene so max(width, height) <= max_dim
// (no-op when max_dim <= 0 or the scene is already small enough).  Images
// are area-averaged, GT depth nearest-sampled, intrinsics rescaled to keep
// pixel centers aligned.
SceneDataset downscale_scene(const SceneDataset &scene, int max_dim);

// The full method: photometric sweep per view, credible-correspondence
// triangulation and per-view planar priors, prior-assisted sweep from a
// fresh random field, geometric-consistency rounds over all views, fusion.
// `use_prior = false` skips the prior stage entirely (the geometric phase
// then starts from the photometric maps); `use_geom = false` stops after
// the prior-assisted sweep.  Views whose prior support is insufficient fall
// back to their photometric maps with a warning.
PipelineResult run_pipeline(const SceneDataset &scene, const PipelineConfig &config);

}  // namespace planarmvs
