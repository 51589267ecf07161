#pragma once

#include <cstdint>
#include <vector>

#include "planarmvs/dataset.hpp"

namespace planarmvs {

// Finite textured rectangle in world space.  Texture is value noise attached
// to the plane's (u, v) surface coordinates, so it is consistent across
// views.  Inside the optional uniform window (|u| < window_half_u and
// |v| < window_half_v) the amplitude is forced to zero, producing a
// textureless region.
struct PlaneSpec {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  double half_u = 1.0, half_v = 1.0;
  double base_intensity = 0.5;
  double texture_amplitude = 0.4;
  double texture_scale = 24.0;  // noise lattice cells per scene unit
  double window_half_u = 0.0, window_half_v = 0.0;
};

struct SceneGeometry {
  std::vector<PlaneSpec> planes;
  std::vector<CameraModel> cameras;  // width/height/intrinsics set by caller
};

// Right-handed look-at pose: +z toward `target`, +y roughly along `up`.
CameraModel look_at_camera(const Eigen::Vector3d &center, const Eigen::Vector3d &target,
                           const Eigen::Vector3d &up, double fx, double fy, int width,
                           int height);

// Renders every camera by nearest-plane ray intersection.  Intensities are
// quantized to 8-bit levels so an in-memory scene is bit-identical to one
// that round-trips through PGM files.  Ground-truth depth is analytic;
// pixels hitting no plane get depth 0 (invalid) and intensity 0.  Each
// camera's depth range is set from its own ground truth with a 10% margin.
// Deterministic for a fixed (geometry, seed).  Throws ValidationError if a
// camera sees no plane at all.
SceneDataset render_synthetic_scene(const SceneGeometry &geo, std::uint64_t seed);

// Preset scene builders (shared by the CLI `synth` subcommand and tests).
// `textured`: fronto-parallel plus slanted textured planes, 5 views.
// `lowtex`: a tilted wall whose central window (roughly half of every image)
// is uniform, textured elsewhere, 5 views.
SceneGeometry preset_textured(int width, int height, int views);
SceneGeometry preset_lowtex(int width, int height, int views);

}  // namespace planarmvs
