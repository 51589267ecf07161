#pragma once

#include <Eigen/Dense>

#include "planarmvs/camera.hpp"
#include "planarmvs/depth_map.hpp"

namespace planarmvs {

// Per-pixel plane hypothesis theta = [d, n]: depth along the viewing ray of
// the anchor pixel plus a unit normal in reference-camera coordinates,
// oriented toward the camera (normal . viewing ray < 0).
struct PlaneHypothesis {
  double depth = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
};

// Plane in reference-camera coordinates: normal . X + dist = 0 for points X
// on the plane, with |dist| the distance of the plane from the camera origin.
struct Plane3D {
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  double dist = 0.0;
};

// Camera-frame point seen at `pixel` with z-depth `depth`.
// Throws ValidationError for non-positive depth.
Eigen::Vector3d unproject(const Eigen::Vector2d &pixel, double depth, const CameraModel &cam);

// Plane through three camera-frame points, normal oriented toward the camera
// origin (normal . centroid < 0).  Throws ValidationError when the points are
// collinear or duplicated (triangle area below 1e-12).
Plane3D plane_from_points(const Eigen::Vector3d &p0, const Eigen::Vector3d &p1,
                          const Eigen::Vector3d &p2);

// Depth at which the viewing ray of `pixel` crosses `plane`.
// Throws ValidationError when the ray is parallel to the plane
// (|normal . unit ray| < 1e-12) or the intersection lies behind the camera.
double ray_plane_depth(const Eigen::Vector2d &pixel, const Plane3D &plane,
                       const CameraModel &cam);

// Plane induced by a hypothesis anchored at `pixel`:
// dist = -normal . unproject(pixel, depth).
Plane3D plane_from_hypothesis(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                              const CameraModel &cam);

// Hypothesis anchored at `pixel` lying on `plane`; the normal is flipped if
// needed so it faces the camera at that pixel.
PlaneHypothesis hypothesis_from_plane(const Plane3D &plane, const Eigen::Vector2d &pixel,
                                      const CameraModel &cam);

// Plane-induced homography H = K_src (R_rel - t_rel n^T / dist) K_ref^-1
// mapping homogeneous reference pixels on theta's plane to source pixels.
// Throws ValidationError when the plane passes through either camera center.
Eigen::Matrix3d homography_from_hypothesis(const PlaneHypothesis &theta,
                                           const Eigen::Vector2d &pixel,
                                           const CameraModel &cam_ref,
                                           const CameraModel &cam_src);

// Non-throwing variant for per-pixel inner loops: returns false instead of
// throwing on a degenerate plane.
bool try_homography_from_hypothesis(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                                    const CameraModel &cam_ref, const RelativePose &rel,
                                    const CameraModel &cam_src, Eigen::Matrix3d *H);

// Homogeneous-normalized application of H.  Returns false (and leaves *out
// untouched) when the mapped point is at or behind the source camera
// (homogeneous scale <= 0).
bool apply_homography(const Eigen::Matrix3d &H, const Eigen::Vector2d &pixel,
                      Eigen::Vector2d *out);

// Reprojection error of Eq-style forward-backward chaining: the reference
// pixel is pushed into the source view at theta's depth, re-unprojected with
// the depth stored in the source depth map, and projected back into the
// reference view; the result is the pixel distance to the starting point.
// Returns +infinity when the forward projection leaves the source image or
// the source depth is invalid there.
double reprojection_error(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                          const CameraModel &cam_ref, const CameraModel &cam_src,
                          const DepthMap &depth_src);

// Same error with the reference -> source pose precomputed by the caller.
double reprojection_error(const PlaneHypothesis &theta, const Eigen::Vector2d &pixel,
                          const CameraModel &cam_ref, const RelativePose &rel,
                          const CameraModel &cam_src, const DepthMap &depth_src);

// Angle between two unit vectors with the dot product clamped to [-1, 1].
double normal_angle(const Eigen::Vector3d &n1, const Eigen::Vector3d &n2);

}  // namespace planarmvs
