#include "planarmvs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planarmvs/errors.hpp"

namespace planarmvs {

Eigen::Vector3d unproject(const Eigen::Vector2d &pixel, double depth, const CameraModel &cam) {
  if (!(depth > 0.0))
    throw ValidationError("unproject: depth must be positive");
  return depth * cam.pixel_ray(pixel.x(), pixel.y());
}

Plane3D plane_from_points(const Eigen::Vector3d &p0, const Eigen::Vector3d &p1,
                          const Eigen::Vector3d &p2) {
  const Eigen::Vector3d cross = (p1 - p0).cross(p2 - p0);
  const double area2 = cross.norm();
  if (0.5 * area2 < 1e-12)
    throw ValidationError("plane_from_points: degenerate triangle (collinear or duplicate points)");
  Plane3D plane;
  plane.normal = cross / area2;
  const Eigen::Vector3d centroid = (p0 + p1 + p2) / 3.0;
  if (plane.normal.dot(centroid) > 0.0) plane.normal = -plane.normal;
  plane.dist = -plane.normal.dot(p0);
  return plane;
}

double ray_plane_depth(const Eigen::Vector2d &pixel, const Plane3D &plane,
                       const CameraModel &cam) {
  const Eigen::Vector3d v = cam.pixel_ray(pixel.x(), pixel.y());
  const double denom = plane.normal.dot(v);
  if (std::abs(denom / v.norm()) < 1e-12)
    throw ValidationError("ray_plane_depth: viewing ray parallel to plane");
  const double depth = -plane.dist / denom;
  if (!(depth > 0.0))
    throw ValidationError("ray_plane_depth: intersection behind the camera");
  return depth;
}

Plane3D plane_from_hypothesis(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                              const CameraModel &cam) {
  Plane3D plane;
  plane.normal = theta.normal;
  plane.dist = -theta.normal.dot(unproject(pixel, theta.depth, cam));
  return plane;
}

PlaneHypothesis hypothesis_from_plane(const Plane3D &plane, const Eigen::Vector2d &pixel,
                                      const CameraModel &cam) {
  PlaneHypothesis theta;
  theta.depth = ray_plane_depth(pixel, plane, cam);
  theta.normal = plane.normal;
  if (theta.normal.dot(cam.pixel_ray(pixel.x(), pixel.y())) > 0.0)
    theta.normal = -theta.normal;
  return theta;
}

bool try_homography_from_hypothesis(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                                    const CameraModel &cam_ref, const RelativePose &rel,
                                    const CameraModel &cam_src, Eigen::Matrix3d *H) {
  const Plane3D plane = plane_from_hypothesis(theta, pixel, cam_ref);
  if (std::abs(plane.dist) < 1e-12) return false;
  // Distance of the plane from the source camera center (the source center in
  // reference-camera coordinates is -R_rel^T t_rel).
  const double dist_src = plane.normal.dot(-rel.R.transpose() * rel.t) + plane.dist;
  if (std::abs(dist_src) < 1e-12) return false;
  const Eigen::Matrix3d A = rel.R - rel.t * plane.normal.transpose() / plane.dist;
  *H = cam_src.K() * A * cam_ref.K_inverse();
  return true;
}

Eigen::Matrix3d homography_from_hypothesis(const PlaneHypothesis &theta,
                                           const Eigen::Vector2d &pixel,
                                           const CameraModel &cam_ref,
                                           const CameraModel &cam_src) {
  Eigen::Matrix3d H;
  if (!try_homography_from_hypothesis(theta, pixel, cam_ref, relative_pose(cam_ref, cam_src),
                                      cam_src, &H))
    throw ValidationError("homography_from_hypothesis: plane through a camera center");
  return H;
}

bool apply_homography(const Eigen::Matrix3d &H, const Eigen::Vector2d &pixel,
                      Eigen::Vector2d *out) {
  const Eigen::Vector3d mapped = H * Eigen::Vector3d(pixel.x(), pixel.y(), 1.0);
  if (!(mapped.z() > 1e-12)) return false;
  *out = mapped.hnormalized();
  return true;
}

double reprojection_error(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                          const CameraModel &cam_ref, const CameraModel &cam_src,
                          const DepthMap &depth_src) {
  return reprojection_error(theta, pixel, cam_ref, relative_pose(cam_ref, cam_src), cam_src,
                            depth_src);
}

double reprojection_error(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                          const CameraModel &cam_ref, const RelativePose &rel,
                          const CameraModel &cam_src, const DepthMap &depth_src) {
  constexpr double kInfinity = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d x_ref = unproject(pixel, theta.depth, cam_ref);
  const Eigen::Vector3d x_src = rel.R * x_ref + rel.t;
  if (!(x_src.z() > 0.0)) return kInfinity;
  const Eigen::Vector2d px_src = cam_src.project(x_src);
  if (!cam_src.contains(px_src.x(), px_src.y())) return kInfinity;
  const double d_src = sample_depth_bilinear(depth_src, px_src.x(), px_src.y());
  if (!(d_src > 0.0)) return kInfinity;
  const Eigen::Vector3d x_src_stored = d_src * cam_src.pixel_ray(px_src.x(), px_src.y());
  const Eigen::Vector3d x_back = rel.R.transpose() * (x_src_stored - rel.t);
  if (!(x_back.z() > 0.0)) return kInfinity;
  const Eigen::Vector2d px_back = cam_ref.project(x_back);
  return (px_back - pixel).norm();
}

double normal_angle(const Eigen::Vector3d &n1, const Eigen::Vector3d &n2) {
  const double dot = std::clamp(n1.dot(n2), -1.0, 1.0);
  return std::acos(dot);
}

}  // namespace planarmvs
