#include "planarmvs/geomcons.hpp"

#include <algorithm>
#include <cmath>

#include "planarmvs/errors.hpp"

namespace planarmvs {

double geo_penalty(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                   const CameraModel &cam_ref, const CameraModel &cam_src,
                   const RelativePose &rel, const DepthMap &depth_src, double lambda_geo,
                   double tau_geo) {
  const double err = reprojection_error(theta, pixel, cam_ref, rel, cam_src, depth_src);
  return lambda_geo * std::min(err, tau_geo);
}

double c_geo(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
             const ViewWeights &weights, const std::vector<double> &m_row,
             const GeomContext &ctx, const CameraModel &cam_ref,
             const std::vector<CameraModel> &cams_src) {
  const std::size_t n = std::min({weights.w.size(), m_row.size(), ctx.src_depths.size(),
                                  cams_src.size()});
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (weights.w[j] <= 0.0) continue;
    const double pen = geo_penalty(theta, pixel, cam_ref, cams_src[j],
                                   relative_pose(cam_ref, cams_src[j]), *ctx.src_depths[j],
                                   ctx.lambda_geo, ctx.tau_geo);
    num += weights.w[j] * (m_row[j] + pen);
    den += weights.w[j];
  }
  if (!(den > 0.0)) throw ValidationError("c_geo: all view weights are zero");
  return num / den;
}

}  // namespace planarmvs
