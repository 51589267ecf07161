#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "planarmvs/dataset.hpp"
#include "planarmvs/geomcons.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/hypothesis_map.hpp"
#include "planarmvs/photometric.hpp"
#include "planarmvs/prior.hpp"
#include "planarmvs/rng.hpp"

namespace planarmvs {

// Which aggregated cost the sweep minimizes.
enum class CostModel {
  kPhoto,       // weighted photometric mean
  kPriorPhoto,  // photometric likelihood combined with the planar prior
  kGeometric,   // photometric mean plus truncated reprojection penalty
};

// Everything the per-pixel cost needs beyond the hypothesis itself. The
// pointers must outlive the run_phase call that uses them.
struct CostContext {
  CostModel model = CostModel::kPhoto;
  const PriorModel *prior = nullptr;    // required for kPriorPhoto
  const GeomContext *geom = nullptr;    // required for kGeometric
};

struct EngineParams {
  PatchSpec patch;
  double sigma = 0.3;          // good-match bandwidth of view selection
  double eta = 0.9;            // visibility-consistency vote weight
  double alpha = 0.18;         // photometric likelihood bandwidth
  double gamma = 0.5;          // prior floor
  double lambda_d = 0.0;       // prior depth bandwidth; set per scene
  double lambda_n = 0.0872664625997164788;  // prior normal bandwidth (5 deg)
  int top_k = 4;               // best-K aggregation at random init
  int threads = 1;
  std::uint64_t seed = 0;
};

// Checkerboard PatchMatch sweep for one reference view. The engine holds
// borrowed references into the dataset; the dataset must outlive it.
class PatchMatchEngine {
 public:
  PatchMatchEngine(const SceneDataset &scene, int ref_index, EngineParams params);

  // Per-pixel uniform depth in [depth_min, depth_max] and a unit normal drawn
  // from the camera-facing hemisphere; stored cost is the best-K aggregate of
  // the per-source photometric costs. phase_tag keys the random streams.
  HypothesisMap random_init(std::uint64_t phase_tag) const;

  // One best hypothesis per sampling region of the opposite checkerboard
  // color: four near V-shapes and four long strips, chosen by stored cost.
  std::vector<PlaneHypothesis> checkerboard_neighbors(const HypothesisMap &map, int x,
                                                      int y) const;

  // T checkerboard iterations (update + refine per color) of the sweep under
  // the given cost model. T == 0 leaves the map untouched; otherwise entry
  // costs are recomputed under ctx before the first iteration. phase_tag must
  // differ between phases so refinement streams never repeat.
  void run_phase(HypothesisMap &map, const CostContext &ctx, int iterations,
                 std::uint64_t phase_tag);

  // Exposed sub-steps of one half-iteration, operating on a single pixel.
  void update_pixel(HypothesisMap &map, VisibilityMap &vis, int x, int y,
                    const CostContext &ctx) const;
  void refine_pixel(HypothesisMap &map, VisibilityMap &vis, int x, int y,
                    const CostContext &ctx, std::uint64_t phase_tag, int half_pass) const;

  // Cost of one hypothesis set at one pixel under ctx; weights are selected
  // over the whole candidate set. Returns per-candidate costs and the view
  // weights used. Exposed for the entry recompute and for tests.
  ViewWeights evaluate(const std::vector<PlaneHypothesis> &candidates, int x, int y,
                       const VisibilityMap &vis, const CostContext &ctx,
                       std::vector<double> *costs) const;

  const CameraModel &ref_camera() const { return *cam_ref_; }
  int source_count() const { return static_cast<int>(src_index_.size()); }
  const std::vector<int> &source_indices() const { return src_index_; }
  const std::vector<CameraModel> &source_cameras() const { return src_cams_; }

 private:
  struct Evaluation;

  // Fills the per-source matching costs of every candidate (dedup aware),
  // selects view weights, and produces per-candidate aggregated costs.
  void evaluate_into(const std::vector<PlaneHypothesis> &candidates, int x, int y,
                     const VisibilityMap &vis, const CostContext &ctx, Evaluation &ev) const;

  // Reorients a propagated or sampled normal so it faces the camera along the
  // ray of (x, y); the underlying plane is unchanged.
  PlaneHypothesis canonical_at(PlaneHypothesis theta, int x, int y) const;

  PlaneHypothesis random_hypothesis(StreamRng &rng, int x, int y) const;
  Eigen::Vector3d random_facing_normal(StreamRng &rng, const Eigen::Vector3d &ray) const;
  Eigen::Vector3d perturbed_normal(StreamRng &rng, const Eigen::Vector3d &normal,
                                   const Eigen::Vector3d &ray, double cone) const;

  const SceneDataset *scene_;
  int ref_index_;
  EngineParams params_;
  const CameraModel *cam_ref_;
  const ImageF *img_ref_;
  std::vector<int> src_index_;          // dataset view index per source
  std::vector<CameraModel> src_cams_;
  std::vector<const ImageF *> src_imgs_;
  std::vector<RelativePose> rel_;       // reference -> source
};

}  // namespace planarmvs
