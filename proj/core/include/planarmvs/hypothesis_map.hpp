#pragma once

#include "planarmvs/depth_map.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/grid.hpp"

namespace planarmvs {

// Per-pixel plane hypotheses plus their current aggregated cost under the
// active phase's cost function (Eq. 7 phase costs may be negative, down to
// -log(1 + gamma)).
struct HypothesisMap {
  Grid<PlaneHypothesis> hyp;
  Grid<double> cost;

  HypothesisMap() = default;
  HypothesisMap(int width, int height)
      : hyp(width, height), cost(width, height, 0.0) {}

  int width() const { return hyp.width(); }
  int height() const { return hyp.height(); }

  // Float extraction for file output; every pixel carries a hypothesis, so
  // the resulting maps have no invalid entries.
  DepthMap depth_map() const;
  NormalMap normal_map() const;
  DepthMap cost_map() const;
};

}  // namespace planarmvs
