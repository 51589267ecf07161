#include "planarmvs/camera.hpp"

#include <cmath>
#include <sstream>

#include "planarmvs/errors.hpp"

namespace planarmvs {

Eigen::Matrix3d CameraModel::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d CameraModel::K_inverse() const {
  Eigen::Matrix3d k;
  k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Vector3d CameraModel::center() const { return -R.transpose() * t; }

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw ValidationError("camera: focal lengths must be positive");
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) || !std::isfinite(cy))
    throw ValidationError("camera: non-finite intrinsics");
  if (width <= 0 || height <= 0)
    throw ValidationError("camera: image dimensions must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw ValidationError("camera: principal point outside image bounds");
  if (!(depth_min > 0.0) || !(depth_max > depth_min)) {
    std::ostringstream os;
    os << "camera: invalid depth range [" << depth_min << ", " << depth_max << "]";
    throw ValidationError(os.str());
  }
  const Eigen::Matrix3d rrt = R * R.transpose();
  if ((rrt - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("camera: rotation is not orthonormal");
  if (std::abs(R.determinant() - 1.0) > 1e-9)
    throw ValidationError("camera: rotation determinant is not +1");
  if (!t.allFinite())
    throw ValidationError("camera: non-finite translation");
}

RelativePose relative_pose(const CameraModel &cam_ref, const CameraModel &cam_src) {
  RelativePose rel;
  rel.R = cam_src.R * cam_ref.R.transpose();
  rel.t = cam_src.t - rel.R * cam_ref.t;
  return rel;
}

}  // namespace planarmvs
