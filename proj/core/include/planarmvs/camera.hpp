#pragma once

#include <Eigen/Dense>

namespace planarmvs {

// Pinhole camera.  World-to-camera transform X_cam = R * X_world + t,
// intrinsics K = [[fx, 0, cx], [0, fy, cy], [0, 0, 1]].
//
// Depth is the camera-frame z coordinate: the camera-frame point seen at
// pixel (x, y) with depth d is  d * K^-1 * (x, y, 1)^T.
struct CameraModel {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  double depth_min = 0.1, depth_max = 10.0;
  int width = 0, height = 0;

  Eigen::Matrix3d K() const;
  Eigen::Matrix3d K_inverse() const;

  // Camera center in world coordinates, -R^T * t.
  Eigen::Vector3d center() const;

  Eigen::Vector3d to_camera(const Eigen::Vector3d &x_world) const { return R * x_world + t; }
  Eigen::Vector3d to_world(const Eigen::Vector3d &x_cam) const { return R.transpose() * (x_cam - t); }

  // Intrinsic projection of a camera-frame point (z > 0 assumed; callers
  // must check the depth themselves).
  Eigen::Vector2d project(const Eigen::Vector3d &x_cam) const {
    return {fx * x_cam.x() / x_cam.z() + cx, fy * x_cam.y() / x_cam.z() + cy};
  }

  Eigen::Vector2d project_world(const Eigen::Vector3d &x_world, double *depth = nullptr) const {
    const Eigen::Vector3d xc = to_camera(x_world);
    if (depth) *depth = xc.z();
    return project(xc);
  }

  // Camera-frame direction K^-1 * (x, y, 1)^T (unnormalized, z = 1).
  Eigen::Vector3d pixel_ray(double x, double y) const {
    return {(x - cx) / fx, (y - cy) / fy, 1.0};
  }

  bool contains(double x, double y) const {
    return x >= 0.0 && x <= width - 1.0 && y >= 0.0 && y <= height - 1.0;
  }

  // Throws ValidationError when intrinsics, rotation, image size, or the
  // depth range are out of contract.
  void validate() const;
};

// Relative pose mapping reference-camera coordinates into source-camera
// coordinates: X_src = R_rel * X_ref + t_rel.
struct RelativePose {
  Eigen::Matrix3d R;
  Eigen::Vector3d t;
};

RelativePose relative_pose(const CameraModel &cam_ref, const CameraModel &cam_src);

}  // namespace planarmvs
