#include "planarmvs/patchmatch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "planarmvs/errors.hpp"
#include "planarmvs/parallel.hpp"

namespace planarmvs {

namespace {

// Iteration slot of the init stream; refinement uses 0, 1, 2, ... so the two
// can never collide.
constexpr std::uint64_t kInitIteration = ~std::uint64_t{0};

constexpr double kRefineDepthFraction = 0.05;     // of the depth range
constexpr double kRefineConeStart = 30.0 * std::numbers::pi / 180.0;

const std::array<Eigen::Vector2i, 4> kFourNeighbors = {
    Eigen::Vector2i(0, -1), Eigen::Vector2i(0, 1), Eigen::Vector2i(-1, 0),
    Eigen::Vector2i(1, 0)};

bool same_hypothesis(const PlaneHypothesis &a, const PlaneHypothesis &b) {
  return a.depth == b.depth && a.normal == b.normal;
}

}  // namespace

DepthMap HypothesisMap::depth_map() const {
  DepthMap out(width(), height(), 0.0f);
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      out.at(x, y) = static_cast<float>(hyp.at(x, y).depth);
  return out;
}

NormalMap HypothesisMap::normal_map() const {
  NormalMap out(width(), height(), Eigen::Vector3f::Zero());
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      out.at(x, y) = hyp.at(x, y).normal.cast<float>();
  return out;
}

DepthMap HypothesisMap::cost_map() const {
  DepthMap out(width(), height(), 0.0f);
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      out.at(x, y) = static_cast<float>(cost.at(x, y));
  return out;
}

struct PatchMatchEngine::Evaluation {
  std::vector<std::vector<double>> rows;  // [candidate][source] matching costs
  std::vector<std::vector<double>> m;     // [source][candidate], view_selection layout
  std::vector<std::vector<double>> pen;   // [candidate][source] geometric penalties
  ViewWeights weights;
  std::vector<double> costs;              // [candidate] aggregated cost
};

PatchMatchEngine::PatchMatchEngine(const SceneDataset &scene, int ref_index, EngineParams params)
    : scene_(&scene), ref_index_(ref_index), params_(params) {
  if (ref_index < 0 || ref_index >= scene.view_count())
    throw ValidationError("engine: reference index out of range");
  if (scene.view_count() < 2)
    throw ValidationError("engine: need at least two views");
  if (scene.view_count() - 1 > 32)
    throw ValidationError("engine: at most 32 source views are supported");
  params_.patch.validate();
  if (!(params_.lambda_d > 0.0)) {
    const CameraModel &c = scene.cameras[ref_index];
    params_.lambda_d = (c.depth_max - c.depth_min) / 64.0;
  }
  cam_ref_ = &scene.cameras[ref_index];
  img_ref_ = &scene.images[ref_index];
  for (int j = 0; j < scene.view_count(); ++j) {
    if (j == ref_index) continue;
    src_index_.push_back(j);
    src_cams_.push_back(scene.cameras[j]);
    src_imgs_.push_back(&scene.images[j]);
    rel_.push_back(relative_pose(*cam_ref_, scene.cameras[j]));
  }
}

PlaneHypothesis PatchMatchEngine::canonical_at(PlaneHypothesis theta, int x, int y) const {
  // Flipping the normal keeps the same plane (and the same homography); it
  // only restores the camera-facing orientation at the new anchor pixel.
  if (theta.normal.dot(cam_ref_->pixel_ray(x, y)) > 0.0) theta.normal = -theta.normal;
  return theta;
}

Eigen::Vector3d PatchMatchEngine::random_facing_normal(StreamRng &rng,
                                                       const Eigen::Vector3d &ray) const {
  const double z = 2.0 * rng.next_double() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.next_double();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  Eigen::Vector3d n(r * std::cos(phi), r * std::sin(phi), z);
  const double dot = n.dot(ray);
  if (dot > 0.0) n = -n;
  // A normal exactly perpendicular to the ray spans a degenerate plane; fall
  // back to the fronto-parallel orientation.
  if (std::abs(dot) < 1e-12 * ray.norm()) n = -ray.normalized();
  return n;
}

Eigen::Vector3d PatchMatchEngine::perturbed_normal(StreamRng &rng, const Eigen::Vector3d &normal,
                                                   const Eigen::Vector3d &ray,
                                                   double cone) const {
  const double angle = cone * rng.next_double();
  const double azimuth = 2.0 * std::numbers::pi * rng.next_double();
  const Eigen::Vector3d pivot =
      std::abs(normal.x()) > 0.9 ? Eigen::Vector3d::UnitY() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d u = normal.cross(pivot).normalized();
  const Eigen::Vector3d v = normal.cross(u);
  Eigen::Vector3d n = std::cos(angle) * normal +
                      std::sin(angle) * (std::cos(azimuth) * u + std::sin(azimuth) * v);
  n.normalize();
  const double dot = n.dot(ray);
  if (dot > 0.0) n = -n;
  if (std::abs(dot) < 1e-12 * ray.norm()) return normal;  // keep the valid original
  return n;
}

PlaneHypothesis PatchMatchEngine::random_hypothesis(StreamRng &rng, int x, int y) const {
  PlaneHypothesis theta;
  theta.depth = rng.uniform(cam_ref_->depth_min, cam_ref_->depth_max);
  theta.normal = random_facing_normal(rng, cam_ref_->pixel_ray(x, y));
  return theta;
}

HypothesisMap PatchMatchEngine::random_init(std::uint64_t phase_tag) const {
  const int w = img_ref_->width(), h = img_ref_->height();
  HypothesisMap map(w, h);
  const std::size_t n_src = src_index_.size();
  parallel_for_rows(0, h, params_.threads, [&](int y) {
    std::vector<double> m(n_src);
    for (int x = 0; x < w; ++x) {
      const std::uint64_t pixel_id = static_cast<std::uint64_t>(y) * w + x;
      StreamRng rng(StreamRng::derive_key(params_.seed, static_cast<std::uint64_t>(ref_index_),
                                          phase_tag, kInitIteration, pixel_id));
      const PlaneHypothesis theta = random_hypothesis(rng, x, y);
      for (std::size_t j = 0; j < n_src; ++j)
        m[j] = matching_cost(Eigen::Vector2i(x, y), theta, *img_ref_, *src_imgs_[j], *cam_ref_,
                             rel_[j], src_cams_[j], params_.patch);
      map.hyp.at(x, y) = theta;
      map.cost.at(x, y) = init_aggregate(m, params_.top_k);
    }
  });
  return map;
}

std::vector<PlaneHypothesis> PatchMatchEngine::checkerboard_neighbors(const HypothesisMap &map,
                                                                      int x, int y) const {
  // Four near V-shaped regions and four long strips, all on the opposite
  // checkerboard color.  Each region contributes its minimum-stored-cost
  // hypothesis; off-image pixels are skipped and empty regions contribute
  // nothing.
  static const std::array<std::array<Eigen::Vector2i, 3>, 4> kNear = {{
      {Eigen::Vector2i(0, -1), Eigen::Vector2i(-1, -2), Eigen::Vector2i(1, -2)},   // up
      {Eigen::Vector2i(0, 1), Eigen::Vector2i(-1, 2), Eigen::Vector2i(1, 2)},      // down
      {Eigen::Vector2i(-1, 0), Eigen::Vector2i(-2, -1), Eigen::Vector2i(-2, 1)},   // left
      {Eigen::Vector2i(1, 0), Eigen::Vector2i(2, -1), Eigen::Vector2i(2, 1)},      // right
  }};
  static const std::array<Eigen::Vector2i, 4> kAxes = {
      Eigen::Vector2i(0, -1), Eigen::Vector2i(0, 1), Eigen::Vector2i(-1, 0),
      Eigen::Vector2i(1, 0)};

  std::vector<PlaneHypothesis> out;
  out.reserve(8);
  const auto consider = [&](int px, int py, double &best, int &bx, int &by) {
    if (!map.hyp.contains(px, py)) return;
    const double c = map.cost.at(px, py);
    if (c < best) {
      best = c;
      bx = px;
      by = py;
    }
  };

  for (const auto &region : kNear) {
    double best = std::numeric_limits<double>::infinity();
    int bx = -1, by = -1;
    for (const auto &off : region) consider(x + off.x(), y + off.y(), best, bx, by);
    if (bx >= 0) out.push_back(map.hyp.at(bx, by));
  }
  for (const auto &axis : kAxes) {
    double best = std::numeric_limits<double>::infinity();
    int bx = -1, by = -1;
    for (int k = 3; k <= 23; k += 2)
      consider(x + axis.x() * k, y + axis.y() * k, best, bx, by);
    if (bx >= 0) out.push_back(map.hyp.at(bx, by));
  }
  return out;
}

void PatchMatchEngine::evaluate_into(const std::vector<PlaneHypothesis> &candidates, int x,
                                     int y, const VisibilityMap &vis, const CostContext &ctx,
                                     Evaluation &ev) const {
  if (candidates.empty()) throw ValidationError("evaluate: empty candidate set");
  const std::size_t n_cand = candidates.size();
  const std::size_t n_src = src_index_.size();
  const Eigen::Vector2i pixel(x, y);
  const Eigen::Vector2d pixel_d(x, y);
  const bool geo = ctx.model == CostModel::kGeometric;

  // Per-source matching costs (and geometric penalties), computed once per
  // distinct hypothesis; propagated duplicates share the same rows so the
  // view-selection multiset still counts them.
  ev.rows.assign(n_cand, std::vector<double>(n_src));
  if (geo) ev.pen.assign(n_cand, std::vector<double>(n_src));
  for (std::size_t i = 0; i < n_cand; ++i) {
    std::size_t dup = i;
    for (std::size_t k = 0; k < i; ++k) {
      if (same_hypothesis(candidates[k], candidates[i])) {
        dup = k;
        break;
      }
    }
    if (dup != i) {
      ev.rows[i] = ev.rows[dup];
      if (geo) ev.pen[i] = ev.pen[dup];
      continue;
    }
    for (std::size_t j = 0; j < n_src; ++j) {
      ev.rows[i][j] = matching_cost(pixel, candidates[i], *img_ref_, *src_imgs_[j], *cam_ref_,
                                    rel_[j], src_cams_[j], params_.patch);
      if (geo)
        ev.pen[i][j] = geo_penalty(candidates[i], pixel_d, *cam_ref_, src_cams_[j], rel_[j],
                                   *ctx.geom->src_depths[j], ctx.geom->lambda_geo,
                                   ctx.geom->tau_geo);
    }
  }

  ev.m.assign(n_src, std::vector<double>(n_cand));
  for (std::size_t j = 0; j < n_src; ++j)
    for (std::size_t i = 0; i < n_cand; ++i) ev.m[j][i] = ev.rows[i][j];

  // Visibility votes of the in-bounds 4-neighbors under the previous
  // half-iteration's flags.
  std::vector<std::pair<int, int>> neighbor_vis(n_src, {0, 0});
  for (const auto &off : kFourNeighbors) {
    const int nx = x + off.x(), ny = y + off.y();
    if (!vis.contains(nx, ny)) continue;
    const std::uint32_t mask = vis.at(nx, ny);
    for (std::size_t j = 0; j < n_src; ++j) {
      ++neighbor_vis[j].second;
      neighbor_vis[j].first += (mask >> j) & 1u;
    }
  }

  ev.weights = view_selection(ev.m, neighbor_vis, params_.sigma, params_.eta);

  ev.costs.assign(n_cand, 0.0);
  for (std::size_t i = 0; i < n_cand; ++i) {
    switch (ctx.model) {
      case CostModel::kPhoto:
        ev.costs[i] = c_photo(ev.weights, ev.rows[i]);
        break;
      case CostModel::kPriorPhoto: {
        const double c = c_photo(ev.weights, ev.rows[i]);
        const bool has = ctx.prior->has(x, y);
        ev.costs[i] = c_p_photo(candidates[i], c, has, has ? ctx.prior->depth.at(x, y) : 0.0,
                                has ? ctx.prior->normal.at(x, y) : Eigen::Vector3d::Zero(),
                                params_.alpha, params_.gamma, params_.lambda_d,
                                params_.lambda_n);
        break;
      }
      case CostModel::kGeometric: {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < n_src; ++j) {
          const double w = ev.weights.w[j];
          if (w <= 0.0) continue;
          num += w * (ev.rows[i][j] + ev.pen[i][j]);
          den += w;
        }
        if (!(den > 0.0)) throw InternalError("evaluate: geometric cost with zero weight sum");
        ev.costs[i] = num / den;
        break;
      }
    }
  }
}

ViewWeights PatchMatchEngine::evaluate(const std::vector<PlaneHypothesis> &candidates, int x,
                                       int y, const VisibilityMap &vis, const CostContext &ctx,
                                       std::vector<double> *costs) const {
  Evaluation ev;
  evaluate_into(candidates, x, y, vis, ctx, ev);
  if (costs) *costs = ev.costs;
  return ev.weights;
}

void PatchMatchEngine::update_pixel(HypothesisMap &map, VisibilityMap &vis, int x, int y,
                                    const CostContext &ctx) const {
  std::vector<PlaneHypothesis> cands;
  cands.reserve(9);
  cands.push_back(map.hyp.at(x, y));
  for (const PlaneHypothesis &theta : checkerboard_neighbors(map, x, y))
    cands.push_back(canonical_at(theta, x, y));

  Evaluation ev;
  evaluate_into(cands, x, y, vis, ctx, ev);
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (ev.costs[i] < ev.costs[best]) best = i;  // ties keep the lower index
  map.hyp.at(x, y) = cands[best];
  map.cost.at(x, y) = ev.costs[best];
}

void PatchMatchEngine::refine_pixel(HypothesisMap &map, VisibilityMap &vis, int x, int y,
                                    const CostContext &ctx, std::uint64_t phase_tag,
                                    int iteration) const {
  const PlaneHypothesis cur = map.hyp.at(x, y);
  const Eigen::Vector3d ray = cam_ref_->pixel_ray(x, y);
  const double dmin = cam_ref_->depth_min, dmax = cam_ref_->depth_max;
  const double scale = 1.0 / static_cast<double>(std::uint64_t{1} << std::min(iteration, 62));
  const double delta = kRefineDepthFraction * (dmax - dmin) * scale;
  const double cone = kRefineConeStart * scale;

  const std::uint64_t pixel_id =
      static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(map.width()) + x;
  StreamRng rng(StreamRng::derive_key(params_.seed, static_cast<std::uint64_t>(ref_index_),
                                      phase_tag, static_cast<std::uint64_t>(iteration),
                                      pixel_id));

  // Fixed draw order regardless of acceptance: perturbed depth, random depth,
  // perturbed normal (2 draws), random normal (2 draws).
  const double d_p =
      std::clamp(cur.depth + (2.0 * rng.next_double() - 1.0) * delta, dmin, dmax);
  const double d_r = rng.uniform(dmin, dmax);
  const Eigen::Vector3d n_p = perturbed_normal(rng, cur.normal, ray, cone);
  const Eigen::Vector3d n_r = random_facing_normal(rng, ray);

  std::vector<PlaneHypothesis> cands;
  cands.reserve(7);
  cands.push_back(cur);
  cands.push_back({d_p, cur.normal});
  cands.push_back({d_r, cur.normal});
  cands.push_back({cur.depth, n_p});
  cands.push_back({cur.depth, n_r});
  cands.push_back({d_r, n_r});
  cands.push_back({d_p, n_p});

  Evaluation ev;
  evaluate_into(cands, x, y, vis, ctx, ev);
  // Sequential acceptance of strictly cheaper candidates == first minimum.
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (ev.costs[i] < ev.costs[best]) best = i;
  map.hyp.at(x, y) = cands[best];
  map.cost.at(x, y) = ev.costs[best];

  // Refresh this pixel's visibility flags from the freshest view selection.
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < ev.weights.vis.size(); ++j)
    if (ev.weights.vis[j]) mask |= std::uint32_t{1} << j;
  vis.at(x, y) = mask;
}

void PatchMatchEngine::run_phase(HypothesisMap &map, const CostContext &ctx, int iterations,
                                 std::uint64_t phase_tag) {
  const int w = img_ref_->width(), h = img_ref_->height();
  if (map.width() != w || map.height() != h)
    throw ValidationError("run_phase: hypothesis map does not match the reference image");
  if (ctx.model == CostModel::kPriorPhoto && ctx.prior == nullptr)
    throw ValidationError("run_phase: prior-assisted cost needs a prior model");
  if (ctx.model == CostModel::kGeometric) {
    if (ctx.geom == nullptr)
      throw ValidationError("run_phase: geometric cost needs source depth maps");
    if (ctx.geom->src_depths.size() != src_index_.size())
      throw ValidationError("run_phase: one source depth map per source view required");
  }
  if (iterations <= 0) return;  // leaves the map untouched, costs included

  const std::size_t n_src = src_index_.size();
  const std::uint32_t all_visible =
      n_src >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n_src) - 1;
  VisibilityMap vis(w, h, all_visible);

  // Re-anchor stored costs to this phase's cost function before sweeping.
  parallel_for_rows(0, h, params_.threads, [&](int y) {
    Evaluation ev;
    std::vector<PlaneHypothesis> single(1);
    for (int x = 0; x < w; ++x) {
      single[0] = map.hyp.at(x, y);
      evaluate_into(single, x, y, vis, ctx, ev);
      map.cost.at(x, y) = ev.costs[0];
    }
  });

  for (int t = 0; t < iterations; ++t) {
    for (int color = 0; color < 2; ++color) {
      // Red pixels ((x + y) even) read only black state and write only red
      // entries, so the fused update + refine sweep is order-independent.
      parallel_for_rows(0, h, params_.threads, [&](int y) {
        for (int x = (y + color) % 2; x < w; x += 2) {
          update_pixel(map, vis, x, y, ctx);
          refine_pixel(map, vis, x, y, ctx, phase_tag, t);
        }
      });
    }
  }
}

}  // namespace planarmvs
