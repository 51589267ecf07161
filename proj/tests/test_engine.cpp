#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "planarmvs/errors.hpp"
#include "planarmvs/patchmatch.hpp"
#include "planarmvs/synthetic.hpp"
#include "test_util.hpp"

using namespace planarmvs;

namespace {

SceneDataset engine_scene(std::uint64_t seed = 3) {
  return render_synthetic_scene(preset_textured(64, 48, 3), seed);
}

EngineParams default_params(std::uint64_t seed = 0, int threads = 1) {
  EngineParams p;
  p.seed = seed;
  p.threads = threads;
  p.lambda_d = 0.05;
  return p;
}

VisibilityMap all_visible(const PatchMatchEngine &eng, int w, int h) {
  const std::uint32_t mask =
      eng.source_count() >= 32 ? ~0u : ((1u << eng.source_count()) - 1u);
  return VisibilityMap(w, h, mask);
}

bool same_map(const HypothesisMap &a, const HypothesisMap &b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (a.cost.at(x, y) != b.cost.at(x, y)) return false;
      if (a.hyp.at(x, y).depth != b.hyp.at(x, y).depth) return false;
      if (!a.hyp.at(x, y).normal.cwiseEqual(b.hyp.at(x, y).normal).all()) return false;
    }
  return true;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("constructor validates the view configuration") {
    SceneDataset scene = engine_scene();
    CHECK_THROWS_AS(PatchMatchEngine(scene, -1, default_params()), ValidationError);
    CHECK_THROWS_AS(PatchMatchEngine(scene, 3, default_params()), ValidationError);
    PatchMatchEngine eng(scene, 1, default_params());
    CHECK(eng.source_count() == 2);
    CHECK(eng.source_indices() == std::vector<int>{0, 2});
    CHECK(eng.ref_camera().width == 64);
  }

  TEST_CASE("checkerboard sampling picks the cheapest pixel per region") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine eng(scene, 0, default_params());
    HypothesisMap map(64, 48);
    // Encode pixel identity in the depth channel; costs say (31, 17) offsets.
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        map.hyp.at(x, y).depth = 1.0 + y * 64 + x;
        map.hyp.at(x, y).normal = Eigen::Vector3d(0, 0, -1);
        map.cost.at(x, y) = 10.0;
      }
    const int cx = 31, cy = 17;
    // Regions in implementation order: four near Vs (up, down, left, right)
    // then four strips (up, down, left, right) at odd offsets 3..23.
    const std::vector<std::vector<Eigen::Vector2i>> regions = {
        {{0, -1}, {-1, -2}, {1, -2}},
        {{0, 1}, {-1, 2}, {1, 2}},
        {{-1, 0}, {-2, -1}, {-2, 1}},
        {{1, 0}, {2, -1}, {2, 1}},
        {{0, -3}, {0, -5}, {0, -7}, {0, -9}, {0, -11}, {0, -13}, {0, -15}, {0, -17}, {0, -19},
         {0, -21}, {0, -23}},
        {{0, 3}, {0, 5}, {0, 7}, {0, 9}, {0, 11}, {0, 13}, {0, 15}, {0, 17}, {0, 19}, {0, 21},
         {0, 23}},
        {{-3, 0}, {-5, 0}, {-7, 0}, {-9, 0}, {-11, 0}, {-13, 0}, {-15, 0}, {-17, 0}, {-19, 0},
         {-21, 0}, {-23, 0}},
        {{3, 0}, {5, 0}, {7, 0}, {9, 0}, {11, 0}, {13, 0}, {15, 0}, {17, 0}, {19, 0}, {21, 0},
         {23, 0}}};
    // Make a distinct pixel cheapest in each region (the second entry).
    for (const auto &region : regions) {
      const Eigen::Vector2i p(cx + region[1].x(), cy + region[1].y());
      map.cost.at(p.x(), p.y()) = 1.0;
    }
    std::vector<PlaneHypothesis> got = eng.checkerboard_neighbors(map, cx, cy);
    REQUIRE(got.size() == 8);
    for (std::size_t r = 0; r < regions.size(); ++r) {
      const Eigen::Vector2i p(cx + regions[r][1].x(), cy + regions[r][1].y());
      CHECK(got[r].depth == map.hyp.at(p.x(), p.y()).depth);
    }

    // Within-region ties keep the first offset in scan order.
    map.cost.at(cx, cy - 1) = 1.0;  // ties the up-V minimum
    got = eng.checkerboard_neighbors(map, cx, cy);
    CHECK(got[0].depth == map.hyp.at(cx, cy - 1).depth);

    // Corner pixels lose the off-image regions: at (0, 0) only down, right,
    // down-strip and right-strip survive.
    got = eng.checkerboard_neighbors(map, 0, 0);
    CHECK(got.size() == 4);

    // All sampled offsets sit on the opposite checkerboard color.
    for (const auto &region : regions)
      for (const auto &off : region) CHECK((off.x() + off.y()) % 2 != 0);
  }

  TEST_CASE("random initialization is deterministic and respects invariants") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine a(scene, 0, default_params(42));
    PatchMatchEngine b(scene, 0, default_params(42));
    PatchMatchEngine c(scene, 0, default_params(43));
    HypothesisMap ma = a.random_init(1);
    CHECK(same_map(ma, b.random_init(1)));
    CHECK_FALSE(same_map(ma, c.random_init(1)));
    CHECK_FALSE(same_map(ma, a.random_init(2)));  // phase tag keys the stream

    const CameraModel &cam = a.ref_camera();
    for (int y = 0; y < ma.height(); ++y)
      for (int x = 0; x < ma.width(); ++x) {
        const PlaneHypothesis &h = ma.hyp.at(x, y);
        CHECK(h.depth >= cam.depth_min);
        CHECK(h.depth <= cam.depth_max);
        CHECK(h.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h.normal.dot(cam.pixel_ray(x, y)) < 0.0);
        CHECK(std::isfinite(ma.cost.at(x, y)));
      }
  }

  TEST_CASE("random init cost is the best-K aggregate of per-source costs") {
    SceneDataset scene = engine_scene();
    EngineParams params = default_params(7);
    params.top_k = 2;
    PatchMatchEngine eng(scene, 1, params);
    HypothesisMap map = eng.random_init(1);
    const CameraModel &cam = eng.ref_camera();
    for (int y = 5; y < 45; y += 9)
      for (int x = 5; x < 60; x += 9) {
        std::vector<double> m;
        for (int j = 0; j < eng.source_count(); ++j) {
          const int src = eng.source_indices()[j];
          m.push_back(matching_cost({x, y}, map.hyp.at(x, y), scene.images[1],
                                    scene.images[src], cam, scene.cameras[src], params.patch));
        }
        CHECK(map.cost.at(x, y) == doctest::Approx(init_aggregate(m, 2)).epsilon(1e-12));
      }
  }

  TEST_CASE("update adopts a better neighbor and keeps ties at the current") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine eng(scene, 0, default_params(11));
    CostContext ctx;  // photometric

    HypothesisMap map(64, 48);
    VisibilityMap vis = all_visible(eng, 64, 48);
    // Everyone holds a wrong fronto plane; one neighbor holds the truth.
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        map.hyp.at(x, y).depth = 2.4;
        map.hyp.at(x, y).normal = Eigen::Vector3d(0, 0, -1);
        map.cost.at(x, y) = 1.9;
      }
    const int cx = 20, cy = 20;  // backdrop pixel (z = 3) in every view
    REQUIRE(scene.gt_depth[0].at(cx, cy) == 3.0f);
    map.hyp.at(cx, cy - 1).depth = 3.0;
    map.cost.at(cx, cy - 1) = 0.05;  // marks it the up-region minimum

    HypothesisMap before = map;
    eng.update_pixel(map, vis, cx, cy, ctx);
    CHECK(map.hyp.at(cx, cy).depth == 3.0);
    CHECK(map.cost.at(cx, cy) < 0.5);
    // Neighbors were read, never written.
    CHECK(map.hyp.at(cx, cy - 1).depth == before.hyp.at(cx, cy - 1).depth);
    CHECK(map.cost.at(cx + 1, cy) == before.cost.at(cx + 1, cy));

    // A uniform map has only duplicate candidates: the pixel must keep its
    // exact hypothesis (first-minimal tie rule) while the cost is refreshed.
    HypothesisMap uniform(64, 48);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        uniform.hyp.at(x, y).depth = 3.0;
        uniform.hyp.at(x, y).normal = Eigen::Vector3d(0, 0, -1);
        uniform.cost.at(x, y) = 0.33;
      }
    eng.update_pixel(uniform, vis, cx, cy, ctx);
    CHECK(uniform.hyp.at(cx, cy).depth == 3.0);
    CHECK(uniform.hyp.at(cx, cy).normal.cwiseEqual(Eigen::Vector3d(0, 0, -1)).all());
    CHECK(uniform.cost.at(cx, cy) < 0.33);  // true cost of the GT plane here
  }

  TEST_CASE("update cost equals the evaluated minimum over the candidate set") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine eng(scene, 0, default_params(5));
    CostContext ctx;
    HypothesisMap map = eng.random_init(1);
    VisibilityMap vis = all_visible(eng, 64, 48);
    const int cx = 33, cy = 22;

    std::vector<PlaneHypothesis> cands;
    cands.push_back(map.hyp.at(cx, cy));
    for (const PlaneHypothesis &h : eng.checkerboard_neighbors(map, cx, cy)) {
      // canonical_at can only flip the normal; both orientations denote the
      // same plane, and the engine evaluates the camera-facing one.
      PlaneHypothesis c = h;
      const Eigen::Vector3d ray = eng.ref_camera().pixel_ray(cx, cy);
      if (c.normal.dot(ray) > 0.0) c.normal = -c.normal;
      cands.push_back(c);
    }
    std::vector<double> costs;
    eng.evaluate(cands, cx, cy, vis, ctx, &costs);
    const double want = *std::min_element(costs.begin(), costs.end());

    eng.update_pixel(map, vis, cx, cy, ctx);
    CHECK(map.cost.at(cx, cy) == doctest::Approx(want).epsilon(1e-12));
  }

  TEST_CASE("refinement never worsens the stored cost and is deterministic") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine eng(scene, 0, default_params(9));
    CostContext ctx;
    HypothesisMap map = eng.random_init(1);
    VisibilityMap vis = all_visible(eng, 64, 48);
    // Entry costs must reflect the context before refinement comparisons make
    // sense: recompute them via singleton evaluation.
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        std::vector<double> costs;
        eng.evaluate({map.hyp.at(x, y)}, x, y, vis, ctx, &costs);
        map.cost.at(x, y) = costs[0];
      }

    HypothesisMap copy = map;
    VisibilityMap vis_copy = vis;
    for (int y = 10; y < 40; y += 5)
      for (int x = 10; x < 60; x += 5) {
        const double before = map.cost.at(x, y);
        eng.refine_pixel(map, vis, x, y, ctx, 1, 0);
        CHECK(map.cost.at(x, y) <= before);
        eng.refine_pixel(copy, vis_copy, x, y, ctx, 1, 0);
        CHECK(copy.cost.at(x, y) == map.cost.at(x, y));
        CHECK(copy.hyp.at(x, y).depth == map.hyp.at(x, y).depth);
        CHECK(copy.hyp.at(x, y).normal.cwiseEqual(map.hyp.at(x, y).normal).all());
        CHECK(vis_copy.at(x, y) == vis.at(x, y));
      }
  }

  TEST_CASE("zero iterations leave the map untouched") {
    SceneDataset scene = engine_scene();
    PatchMatchEngine eng(scene, 0, default_params(13));
    CostContext ctx;
    HypothesisMap map = eng.random_init(1);
    HypothesisMap before = map;
    eng.run_phase(map, ctx, 0, 1);
    CHECK(same_map(map, before));
  }

  TEST_CASE("a phase sweep is bit-identical across worker counts") {
    SceneDataset scene = engine_scene(21);
    HypothesisMap m1, m4;
    {
      PatchMatchEngine eng(scene, 0, default_params(99, 1));
      m1 = eng.random_init(1);
      CostContext ctx;
      eng.run_phase(m1, ctx, 2, 1);
    }
    {
      PatchMatchEngine eng(scene, 0, default_params(99, 4));
      m4 = eng.random_init(1);
      CostContext ctx;
      eng.run_phase(m4, ctx, 2, 1);
    }
    CHECK(same_map(m1, m4));
  }

  TEST_CASE("a sweep improves random initialization toward ground truth") {
    SceneDataset scene = engine_scene(33);
    PatchMatchEngine eng(scene, 0, default_params(3));
    CostContext ctx;
    HypothesisMap map = eng.random_init(1);

    // Score only pixels whose matching window fits entirely inside the image;
    // the border band (almost half of a 64x48 frame) cannot converge.
    const int margin = 8;
    auto good_fraction = [&](const HypothesisMap &m, double rel) {
      int good = 0, valid = 0;
      for (int y = margin; y < m.height() - margin; ++y)
        for (int x = margin; x < m.width() - margin; ++x) {
          const float gt = scene.gt_depth[0].at(x, y);
          if (gt <= 0.0f) continue;
          ++valid;
          good += std::abs(m.hyp.at(x, y).depth - gt) / gt < rel;
        }
      return static_cast<double>(good) / valid;
    };
    // At 64x48 (fx ~ 58, max baseline 0.3) a 0.1 px localization error already
    // maps to ~1.7% relative depth, so score against 2% and 5% bands.
    const double before2 = good_fraction(map, 0.02);
    const double before5 = good_fraction(map, 0.05);
    eng.run_phase(map, ctx, 4, 1);
    const double after2 = good_fraction(map, 0.02);
    const double after5 = good_fraction(map, 0.05);
    MESSAGE("interior rel<2%: ", before2, " -> ", after2, "; rel<5%: ", before5, " -> ", after5);
    CHECK(after2 > before2 + 0.5);
    CHECK(after2 > 0.7);
    CHECK(after5 > 0.9);
    for (int y = 0; y < map.height(); ++y)
      for (int x = 0; x < map.width(); ++x) CHECK(std::isfinite(map.cost.at(x, y)));
  }
}
