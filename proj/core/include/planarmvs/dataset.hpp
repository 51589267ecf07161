#pragma once

#include <string>
#include <vector>

#include "planarmvs/camera.hpp"
#include "planarmvs/depth_map.hpp"
#include "planarmvs/image.hpp"

namespace planarmvs {

// A calibrated multi-view scene.  `rgb` and `gt_depth` are optional (empty
// or one entry per view); every other vector has one entry per view.
struct SceneDataset {
  std::vector<ImageF> images;
  std::vector<ImageRgb> rgb;
  std::vector<CameraModel> cameras;
  std::vector<DepthMap> gt_depth;

  int view_count() const { return static_cast<int>(images.size()); }

  // Enforces the dataset contract: >= 2 views, matching image/camera counts
  // and dimensions, valid cameras and depth ranges.  Throws ValidationError.
  void validate() const;
};

// Scene directory layout:
//   scene/images/NNNN.pgm|ppm   8-bit binary PGM or PPM
//   scene/cams/NNNN.txt         9 rotation entries (row-major), 3 translation
//                               entries, fx fy cx cy, depth_min depth_max
//   scene/gt/NNNN.dmap          optional ground-truth depth
// Views are ordered by filename; every image must have a camera file with
// the same stem.
SceneDataset load_scene(const std::string &dir);
void save_scene(const SceneDataset &scene, const std::string &dir);

CameraModel load_camera(const std::string &path);
void save_camera(const CameraModel &cam, const std::string &path);

// Depth-map file: magic "DMAP1\n", ASCII "width height\n", then row-major
// little-endian 32-bit floats.  load(save(m)) is bit-exact.
DepthMap load_depth_map(const std::string &path);
void save_depth_map(const DepthMap &map, const std::string &path);

// Normal-map sibling format: magic "NMAP1\n", ASCII "width height\n", then
// row-major little-endian 32-bit float triples (x, y, z per pixel).
NormalMap load_normal_map(const std::string &path);
void save_normal_map(const NormalMap &map, const std::string &path);

}  // namespace planarmvs
