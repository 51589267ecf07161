#include "planarmvs/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "planarmvs/errors.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/grid.hpp"

namespace planarmvs {

void FusionParams::validate() const {
  if (!(max_rel_depth_diff > 0.0))
    throw ValidationError("fusion: max_rel_depth_diff must be positive");
  if (!(max_normal_diff > 0.0)) throw ValidationError("fusion: max_normal_diff must be positive");
  if (!(max_reproj_err > 0.0)) throw ValidationError("fusion: max_reproj_err must be positive");
  if (min_consistent < 1) throw ValidationError("fusion: min_consistent must be positive");
}

bool check_consistency(const Eigen::Vector2i &pixel, int ref_index, int src_index,
                       const std::vector<DepthMap> &depths,
                       const std::vector<NormalMap> &normals,
                       const std::vector<CameraModel> &cams, const FusionParams &params,
                       Eigen::Vector2i *landing) {
  const CameraModel &cam_ref = cams[ref_index];
  const CameraModel &cam_src = cams[src_index];
  const double d_ref = depths[ref_index].at(pixel.x(), pixel.y());
  if (!(d_ref > 0.0)) return false;

  // Reference estimate into the source view.
  const Eigen::Vector3d x_world =
      cam_ref.to_world(d_ref * cam_ref.pixel_ray(pixel.x(), pixel.y()));
  const Eigen::Vector3d x_src = cam_src.to_camera(x_world);
  if (!(x_src.z() > 0.0)) return false;
  const Eigen::Vector2d px_src = cam_src.project(x_src);
  const int lx = static_cast<int>(std::lround(px_src.x()));
  const int ly = static_cast<int>(std::lround(px_src.y()));
  if (!depths[src_index].contains(lx, ly)) return false;
  const double d_src = depths[src_index].at(lx, ly);
  if (!(d_src > 0.0)) return false;

  // Relative depth difference between the projected and the stored depth.
  if (!(std::abs(x_src.z() - d_src) / d_src < params.max_rel_depth_diff)) return false;

  // Normal agreement in world coordinates.
  const Eigen::Vector3d n_ref =
      cam_ref.R.transpose() * normals[ref_index].at(pixel.x(), pixel.y()).cast<double>();
  const Eigen::Vector3d n_src =
      cam_src.R.transpose() * normals[src_index].at(lx, ly).cast<double>();
  if (!(normal_angle(n_ref.normalized(), n_src.normalized()) < params.max_normal_diff))
    return false;

  // The landing estimate must project back close to the reference pixel.
  const Eigen::Vector3d back_world = cam_src.to_world(d_src * cam_src.pixel_ray(lx, ly));
  const Eigen::Vector3d back_ref = cam_ref.to_camera(back_world);
  if (!(back_ref.z() > 0.0)) return false;
  const Eigen::Vector2d px_back = cam_ref.project(back_ref);
  if (!((px_back - pixel.cast<double>()).norm() < params.max_reproj_err)) return false;

  if (landing) *landing = Eigen::Vector2i(lx, ly);
  return true;
}

PointCloud fuse(const std::vector<DepthMap> &depths, const std::vector<NormalMap> &normals,
                const std::vector<CameraModel> &cams, const FusionParams &params,
                const std::vector<ImageF> *gray, const std::vector<ImageRgb> *rgb) {
  params.validate();
  const int n_views = static_cast<int>(depths.size());
  if (normals.size() != depths.size() || cams.size() != depths.size())
    throw ValidationError("fusion: depth/normal/camera counts must match");
  for (int v = 0; v < n_views; ++v) {
    if (depths[v].width() != normals[v].width() || depths[v].height() != normals[v].height())
      throw ValidationError("fusion: depth and normal map dimensions must match");
  }

  std::vector<Grid<std::uint8_t>> consumed;
  consumed.reserve(n_views);
  for (int v = 0; v < n_views; ++v)
    consumed.emplace_back(depths[v].width(), depths[v].height(), std::uint8_t{0});

  PointCloud cloud;
  struct Support {
    int view;
    Eigen::Vector2i pixel;
  };
  std::vector<Support> supports;

  for (int ref = 0; ref < n_views; ++ref) {
    const CameraModel &cam_ref = cams[ref];
    for (int y = 0; y < depths[ref].height(); ++y) {
      for (int x = 0; x < depths[ref].width(); ++x) {
        if (consumed[ref].at(x, y)) continue;
        const double d_ref = depths[ref].at(x, y);
        if (!(d_ref > 0.0)) continue;

        supports.clear();
        const Eigen::Vector2i pixel(x, y);
        for (int src = 0; src < n_views; ++src) {
          if (src == ref) continue;
          Eigen::Vector2i landing;
          if (!check_consistency(pixel, ref, src, depths, normals, cams, params, &landing))
            continue;
          if (consumed[src].at(landing.x(), landing.y())) continue;
          supports.push_back({src, landing});
        }
        if (static_cast<int>(supports.size()) < params.min_consistent) continue;

        Eigen::Vector3d pos = cam_ref.to_world(d_ref * cam_ref.pixel_ray(x, y));
        Eigen::Vector3d nrm =
            cam_ref.R.transpose() * normals[ref].at(x, y).cast<double>().normalized();
        for (const Support &s : supports) {
          const CameraModel &cam_src = cams[s.view];
          const double d_src = depths[s.view].at(s.pixel.x(), s.pixel.y());
          pos += cam_src.to_world(d_src * cam_src.pixel_ray(s.pixel.x(), s.pixel.y()));
          nrm += cam_src.R.transpose() *
                 normals[s.view].at(s.pixel.x(), s.pixel.y()).cast<double>().normalized();
        }
        const double count = 1.0 + static_cast<double>(supports.size());
        pos /= count;
        nrm.normalize();

        consumed[ref].at(x, y) = 1;
        for (const Support &s : supports) consumed[s.view].at(s.pixel.x(), s.pixel.y()) = 1;

        cloud.positions.push_back(pos.cast<float>());
        cloud.normals.push_back(nrm.cast<float>());
        if (rgb && !rgb->empty()) {
          cloud.colors.push_back((*rgb)[ref].at(x, y));
        } else if (gray && !gray->empty()) {
          const float g = (*gray)[ref].at(x, y);
          const auto q = static_cast<std::uint8_t>(
              std::lround(std::clamp(g, 0.0f, 1.0f) * 255.0f));
          cloud.colors.push_back({q, q, q});
        }
      }
    }
  }
  return cloud;
}

}  // namespace planarmvs
