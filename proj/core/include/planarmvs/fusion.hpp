#pragma once

#include <vector>

#include "planarmvs/camera.hpp"
#include "planarmvs/depth_map.hpp"
#include "planarmvs/image.hpp"
#include "planarmvs/ply.hpp"

namespace planarmvs {

struct FusionParams {
  double max_rel_depth_diff = 0.01;
  double max_normal_diff = 0.17453292519943295;  // 10 degrees
  double max_reproj_err = 2.0;                   // pixels
  int min_consistent = 2;                        // consistent source views

  // Throws ValidationError unless every threshold is positive.
  void validate() const;
};

// True iff the estimate of view `ref_index` at `pixel` is consistent with
// view `src_index`: the unprojected world point is projected into the source
// and compared against the source's stored estimate at the nearest (landing)
// pixel.  Consistent means relative depth difference < max_rel_depth_diff,
// normal angle < max_normal_diff, and the landing estimate projects back into
// the reference within max_reproj_err pixels.  Off-image landings and invalid
// depths are inconsistent.  On success *landing (when non-null) receives the
// source pixel that supported the match.
bool check_consistency(const Eigen::Vector2i &pixel, int ref_index, int src_index,
                       const std::vector<DepthMap> &depths,
                       const std::vector<NormalMap> &normals,
                       const std::vector<CameraModel> &cams, const FusionParams &params,
                       Eigen::Vector2i *landing = nullptr);

// Merges all views' estimates into one world-space cloud.  Every reference
// pixel with >= min_consistent unconsumed consistent source estimates emits
// the arithmetic mean of the supporting 3D points (its own included) and the
// renormalized mean normal; supporting pixels are marked consumed so each
// estimate fuses at most once.  Views are processed in order, pixels in
// scanline order; the output is deterministic.  `gray` or `rgb` (when
// non-null, one image per view) provide per-point colors.
PointCloud fuse(const std::vector<DepthMap> &depths, const std::vector<NormalMap> &normals,
                const std::vector<CameraModel> &cams, const FusionParams &params,
                const std::vector<ImageF> *gray = nullptr,
                const std::vector<ImageRgb> *rgb = nullptr);

}  // namespace planarmvs
