#pragma once

#include <vector>

#include "planarmvs/camera.hpp"
#include "planarmvs/depth_map.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/photometric.hpp"

namespace planarmvs {

// Inputs of the geometric-consistency cost: one depth map per source view
// (in the engine's source order) plus the regularizer constants.
struct GeomContext {
  std::vector<const DepthMap *> src_depths;
  double lambda_geo = 0.1;
  double tau_geo = 5.0;
};

// Truncated reprojection penalty lambda_geo * min(reprojection error, tau);
// the +infinity off-image sentinel truncates to tau_geo.
double geo_penalty(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                   const CameraModel &cam_ref, const CameraModel &cam_src,
                   const RelativePose &rel, const DepthMap &depth_src, double lambda_geo,
                   double tau_geo);

// Geometric-consistency aggregated cost:
//   sum_j w_j * (m_j + lambda_geo * min(de_j, tau_geo)) / sum_j w_j.
// Throws ValidationError when all weights are zero.
double c_geo(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
             const ViewWeights &weights, const std::vector<double> &m_row,
             const GeomContext &ctx, const CameraModel &cam_ref,
             const std::vector<CameraModel> &cams_src);

}  // namespace planarmvs
