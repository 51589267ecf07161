#include "planarmvs/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "planarmvs/errors.hpp"
#include "planarmvs/rng.hpp"

namespace planarmvs {

CameraModel look_at_camera(const Eigen::Vector3d &center, const Eigen::Vector3d &target,
                           const Eigen::Vector3d &up, double fx, double fy, int width,
                           int height) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d x = up.cross(z);
  if (x.norm() < 1e-12) throw ValidationError("look_at_camera: up parallel to view direction");
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  CameraModel cam;
  cam.R.row(0) = x.transpose();
  cam.R.row(1) = y.transpose();
  cam.R.row(2) = z.transpose();
  cam.t = -cam.R * center;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = (width - 1) / 2.0;
  cam.cy = (height - 1) / 2.0;
  cam.width = width;
  cam.height = height;
  return cam;
}

namespace {

double lattice_value(std::uint64_t seed, int plane, std::int64_t ix, std::int64_t iy) {
  std::uint64_t key = StreamRng::derive_key(seed, static_cast<std::uint64_t>(plane),
                                            static_cast<std::uint64_t>(ix),
                                            static_cast<std::uint64_t>(iy));
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, int plane, double u, double v) {
  const std::int64_t ix = static_cast<std::int64_t>(std::floor(u));
  const std::int64_t iy = static_cast<std::int64_t>(std::floor(v));
  const double fu = u - ix, fv = v - iy;
  const double su = fu * fu * (3.0 - 2.0 * fu);
  const double sv = fv * fv * (3.0 - 2.0 * fv);
  const double v00 = lattice_value(seed, plane, ix, iy);
  const double v10 = lattice_value(seed, plane, ix + 1, iy);
  const double v01 = lattice_value(seed, plane, ix, iy + 1);
  const double v11 = lattice_value(seed, plane, ix + 1, iy + 1);
  return (1.0 - sv) * ((1.0 - su) * v00 + su * v10) + sv * ((1.0 - su) * v01 + su * v11);
}

double surface_intensity(const PlaneSpec &p, int plane_index, std::uint64_t seed, double u,
                         double v) {
  double amp = p.texture_amplitude;
  if (p.window_half_u > 0.0 && p.window_half_v > 0.0 && std::abs(u) < p.window_half_u &&
      std::abs(v) < p.window_half_v)
    amp = 0.0;
  if (amp == 0.0) return std::clamp(p.base_intensity, 0.0, 1.0);
  const double s = p.texture_scale;
  const double t = 0.6 * value_noise(seed, plane_index, u * s, v * s) +
                   0.4 * value_noise(seed, plane_index * 2 + 1, u * s * 3.1 + 17.3,
                                     v * s * 3.1 - 9.7);
  return std::clamp(p.base_intensity + amp * (t - 0.5) * 2.0, 0.0, 1.0);
}

}  // namespace

SceneDataset render_synthetic_scene(const SceneGeometry &geo, std::uint64_t seed) {
  if (geo.planes.empty()) throw ValidationError("render: no planes");
  if (geo.cameras.size() < 2) throw ValidationError("render: need at least 2 cameras");

  SceneDataset scene;
  for (std::size_t ci = 0; ci < geo.cameras.size(); ++ci) {
    CameraModel cam = geo.cameras[ci];
    const Eigen::Vector3d C = cam.center();
    const Eigen::Matrix3d Rt = cam.R.transpose();
    ImageF img(cam.width, cam.height, 0.0f);
    DepthMap gt(cam.width, cam.height, 0.0f);
    double d_lo = std::numeric_limits<double>::infinity();
    double d_hi = 0.0;
    int hits = 0;

    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        // World ray C + d * dir with d the camera-frame z-depth (dir has
        // camera z component 1).
        const Eigen::Vector3d dir = Rt * cam.pixel_ray(x, y);
        double best_d = std::numeric_limits<double>::infinity();
        int best_plane = -1;
        double best_u = 0.0, best_v = 0.0;
        for (std::size_t pi = 0; pi < geo.planes.size(); ++pi) {
          const PlaneSpec &p = geo.planes[pi];
          const Eigen::Vector3d n = p.axis_u.cross(p.axis_v).normalized();
          const double denom = n.dot(dir);
          if (std::abs(denom) < 1e-14) continue;
          const double d = n.dot(p.center - C) / denom;
          if (!(d > 1e-9) || d >= best_d) continue;
          const Eigen::Vector3d hit = C + d * dir - p.center;
          const double u = hit.dot(p.axis_u);
          const double v = hit.dot(p.axis_v);
          if (std::abs(u) > p.half_u || std::abs(v) > p.half_v) continue;
          best_d = d;
          best_plane = static_cast<int>(pi);
          best_u = u;
          best_v = v;
        }
        if (best_plane < 0) continue;
        ++hits;
        const double intensity =
            surface_intensity(geo.planes[best_plane], best_plane, seed, best_u, best_v);
        // Quantize to 8-bit levels so in-memory scenes match PGM round-trips.
        const int q = static_cast<int>(std::lround(intensity * 255.0));
        img.at(x, y) = static_cast<float>(q / 255.0);
        gt.at(x, y) = static_cast<float>(best_d);
        d_lo = std::min(d_lo, best_d);
        d_hi = std::max(d_hi, best_d);
      }
    }
    if (hits == 0)
      throw ValidationError("render: camera " + std::to_string(ci) + " sees no plane");
    cam.depth_min = d_lo * 0.9;
    cam.depth_max = d_hi * 1.1;
    scene.images.push_back(std::move(img));
    scene.cameras.push_back(cam);
    scene.gt_depth.push_back(std::move(gt));
  }
  scene.validate();
  return scene;
}

SceneGeometry preset_textured(int width, int height, int views) {
  SceneGeometry geo;
  const double fx = 0.9 * width;
  for (int i = 0; i < views; ++i) {
    const double x = -0.15 * (views - 1) / 2.0 + 0.15 * i;
    const double y = (i % 2 == 0) ? 0.02 : -0.02;
    CameraModel cam;
    cam.t = -Eigen::Vector3d(x, y, 0.0);  // R = I, center (x, y, 0), facing +z
    cam.fx = cam.fy = fx;
    cam.cx = (width - 1) / 2.0;
    cam.cy = (height - 1) / 2.0;
    cam.width = width;
    cam.height = height;
    geo.cameras.push_back(cam);
  }

  // Backdrop sized so every pixel that images it is also covered by at least
  // one other camera with full patch support; rays past its edge hit nothing
  // and render as invalid.
  PlaneSpec back;
  back.center = {0.0, 0.0, 3.0};
  back.half_u = 1.72;
  back.half_v = 2.0;
  back.base_intensity = 0.45;
  back.texture_amplitude = 0.42;
  back.texture_scale = 7.0;
  geo.planes.push_back(back);

  // Slanted panel.  Its far edge lands on the backdrop (continuous seam, no
  // occlusion there) and its near edge is placed so the occlusion shadow it
  // casts falls beyond the backdrop's right edge in every view, keeping the
  // scene free of depth discontinuities against textured background.
  PlaneSpec slant;
  const double theta = 20.0 * M_PI / 180.0;
  slant.center = {0.97, 0.0, 2.789};
  slant.axis_u = {std::cos(theta), 0.0, -std::sin(theta)};
  slant.axis_v = {0.0, 1.0, 0.0};
  slant.half_u = 0.617;
  slant.half_v = 2.2;
  slant.base_intensity = 0.55;
  slant.texture_amplitude = 0.4;
  slant.texture_scale = 8.0;
  geo.planes.push_back(slant);
  return geo;
}

SceneGeometry preset_lowtex(int width, int height, int views) {
  SceneGeometry geo;
  const double fx = 0.9 * width;
  for (int i = 0; i < views; ++i) {
    const double x = -0.1 * (views - 1) / 2.0 + 0.1 * i;
    const double y = (i % 2 == 0) ? 0.02 : -0.02;
    CameraModel cam;
    cam.t = -Eigen::Vector3d(x, y, 0.0);
    cam.fx = cam.fy = fx;
    cam.cx = (width - 1) / 2.0;
    cam.cy = (height - 1) / 2.0;
    cam.width = width;
    cam.height = height;
    geo.cameras.push_back(cam);
  }

  PlaneSpec wall;
  const double tilt = 8.0 * M_PI / 180.0;
  wall.center = {0.0, 0.0, 2.8};
  wall.axis_u = {std::cos(tilt), 0.0, -std::sin(tilt)};
  wall.axis_v = {0.0, 1.0, 0.0};
  wall.half_u = 2.8;
  wall.half_v = 2.2;
  wall.base_intensity = 0.5;
  wall.texture_amplitude = 0.42;
  wall.texture_scale = 7.5;
  // Central uniform window sized to cover roughly half of each image.
  const double view_half_u = (width / 2.0) / fx * 2.8;
  const double view_half_v = (height / 2.0) / fx * 2.8;
  wall.window_half_u = 0.70 * view_half_u;
  wall.window_half_v = 0.70 * view_half_v;
  geo.planes.push_back(wall);
  return geo;
}

}  // namespace planarmvs
