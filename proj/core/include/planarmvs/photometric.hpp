#pragma once

#include <cstdint>
#include <vector>

#include "planarmvs/camera.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/grid.hpp"
#include "planarmvs/image.hpp"

namespace planarmvs {

// Matching window: samples on a (2*radius+1)^2 grid with the given stride,
// i.e. offsets {-radius, -radius+step, ..., +radius} per axis.
struct PatchSpec {
  int radius = 5;
  int step = 2;

  int samples_per_axis() const { return (2 * radius) / step + 1; }
  // Throws ValidationError unless radius >= 1, step >= 1 and the window
  // yields at least 9 samples.
  void validate() const;
};

// Per-source view-selection result: weight in [0, 1] and the binarized
// visibility flag.
struct ViewWeights {
  std::vector<double> w;
  std::vector<std::uint8_t> vis;
};

// Per-pixel visibility flags for up to 32 source views, packed as a bitmask.
using VisibilityMap = Grid<std::uint32_t>;

// NCC-based matching cost in [0, 2] between the reference patch at `pixel`
// and the source patch warped through theta's plane-induced homography.
// Returns the maximal cost 2 when the warped window exits the source image,
// fewer than 9 window samples land inside the reference image, either patch
// has variance < 1e-10, or the plane geometry is degenerate.
double matching_cost(const Eigen::Vector2i &pixel, const PlaneHypothesis &theta,
                     const ImageF &ref_img, const ImageF &src_img, const CameraModel &cam_ref,
                     const CameraModel &cam_src, const PatchSpec &spec);

// Same cost with the reference -> source pose precomputed by the caller.
double matching_cost(const Eigen::Vector2i &pixel, const PlaneHypothesis &theta,
                     const ImageF &ref_img, const ImageF &src_img, const CameraModel &cam_ref,
                     const RelativePose &rel, const CameraModel &cam_src, const PatchSpec &spec);

// Mean of the K smallest costs (K clamped to the list length).  Throws
// ValidationError on an empty list.
double init_aggregate(const std::vector<double> &costs, int k);

// Probabilistic view selection.  m_costs[j][i] is the matching cost of
// candidate i against source j; neighbor_vis[j] = (visible 4-neighbors,
// total in-bounds 4-neighbors) under the previous half-iteration's
// visibility state.  Per source j:
//   s_j = [mean_i exp(-m_ji^2 / (2 sigma^2))]
//       * [(1/|N|) * sum_neighbors (eta if visible else 1-eta)]
// Weights are s_j normalized by max_j s_j; vis_j = (w_j >= 0.2).  When every
// score is zero the single best-scoring source gets w = 1.
ViewWeights view_selection(const std::vector<std::vector<double>> &m_costs,
                           const std::vector<std::pair<int, int>> &neighbor_vis, double sigma,
                           double eta);

// Aggregated photometric cost (weighted mean of per-source costs).  Throws
// ValidationError when all weights are zero.
double c_photo(const ViewWeights &weights, const std::vector<double> &m_row);

// Photometric likelihood exp(-c^2 / alpha).
double likelihood(double c, double alpha);

}  // namespace planarmvs
