#include "planarmvs/prior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "planarmvs/delaunay.hpp"
#include "planarmvs/errors.hpp"
#include "planarmvs/io_util.hpp"

namespace planarmvs {

CredibleSet select_credible(const HypothesisMap &map, double epsilon) {
  const int w = map.width(), h = map.height();
  CredibleSet all;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (map.cost.at(x, y) < epsilon)
        all.push_back({{x, y}, map.hyp.at(x, y), map.cost.at(x, y)});

  if (all.size() * 4 > static_cast<std::size_t>(w) * h) {
    // Densely textured image: keep the cheapest credible pixel per 2x2 cell.
    Grid<int> best((w + 1) / 2, (h + 1) / 2, -1);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const int cx = all[i].pixel.x() / 2, cy = all[i].pixel.y() / 2;
      int &slot = best.at(cx, cy);
      if (slot < 0 || all[i].cost < all[slot].cost) slot = static_cast<int>(i);
    }
    CredibleSet kept;
    for (const int idx : best)
      if (idx >= 0) kept.push_back(all[idx]);
    std::sort(kept.begin(), kept.end(), [](const CrediblePoint &a, const CrediblePoint &b) {
      if (a.pixel.y() != b.pixel.y()) return a.pixel.y() < b.pixel.y();
      return a.pixel.x() < b.pixel.x();
    });
    all = std::move(kept);
  }

  if (all.size() < 3)
    throw InsufficientSupportError("select_credible: only " + std::to_string(all.size()) +
                                   " credible pixels (need 3)");
  return all;
}

Triangulation triangulate_credible(const CredibleSet &credible) {
  std::vector<Eigen::Vector2i> points;
  points.reserve(credible.size());
  for (const auto &c : credible) points.push_back(c.pixel);
  Triangulation tri;
  tri.vertices = credible;
  tri.triangles = delaunay_triangulate(points);
  return tri;
}

namespace {

using Vec2l = Eigen::Matrix<std::int64_t, 2, 1>;

std::int64_t edge_at(const Vec2l &a, const Vec2l &b, std::int64_t px, std::int64_t py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

// Tie rule for pixels exactly on an edge: accept when the edge direction
// satisfies dx < 0 or (dx == 0 and dy > 0).  This is the exact sign of the
// edge function at the perturbed point p + (-eps^2, -eps), so each interior
// pixel on a shared edge or vertex is claimed by exactly one triangle.
bool accepts_tie(const Vec2l &a, const Vec2l &b) {
  const std::int64_t dx = b.x() - a.x();
  const std::int64_t dy = b.y() - a.y();
  return dx < 0 || (dx == 0 && dy > 0);
}

}  // namespace

PriorModel build_prior_model(const Triangulation &tri, const CameraModel &cam) {
  PriorModel model;
  model.depth = Grid<double>(cam.width, cam.height, 0.0);
  model.normal = Grid<Eigen::Vector3d>(cam.width, cam.height, Eigen::Vector3d::Zero());
  model.owner = Grid<std::int32_t>(cam.width, cam.height, -1);

  struct Raster {
    int index;
    Vec2l a, b, c;
    Plane3D plane;
  };
  std::vector<Raster> rasters;
  rasters.reserve(tri.triangles.size());
  for (std::size_t ti = 0; ti < tri.triangles.size(); ++ti) {
    const auto &t = tri.triangles[ti];
    const auto &v0 = tri.vertices[t[0]];
    const auto &v1 = tri.vertices[t[1]];
    const auto &v2 = tri.vertices[t[2]];
    Plane3D plane;
    try {
      plane = plane_from_points(
          unproject(v0.pixel.cast<double>(), v0.hypothesis.depth, cam),
          unproject(v1.pixel.cast<double>(), v1.hypothesis.depth, cam),
          unproject(v2.pixel.cast<double>(), v2.hypothesis.depth, cam));
    } catch (const ValidationError &) {
      continue;  // 3D-degenerate triangle: no prior from it
    }
    rasters.push_back({static_cast<int>(ti), v0.pixel.cast<std::int64_t>(),
                       v1.pixel.cast<std::int64_t>(), v2.pixel.cast<std::int64_t>(), plane});
  }

  auto assign = [&](const Raster &r, int x, int y) {
    double d;
    try {
      d = ray_plane_depth(Eigen::Vector2d(x, y), r.plane, cam);
    } catch (const ValidationError &) {
      return;  // ray parallel to the plane or intersection behind the camera
    }
    if (r.plane.normal.dot(cam.pixel_ray(x, y)) >= 0.0) return;  // edge-on view
    model.depth.at(x, y) = std::clamp(d, cam.depth_min, cam.depth_max);
    model.normal.at(x, y) = r.plane.normal;
    model.owner.at(x, y) = r.index;
  };

  // Pass 1: interior and tie-rule boundary pixels (each claimed exactly once).
  for (const Raster &r : rasters) {
    const int x0 = std::max<std::int64_t>(0, std::min({r.a.x(), r.b.x(), r.c.x()}));
    const int x1 = std::min<std::int64_t>(cam.width - 1, std::max({r.a.x(), r.b.x(), r.c.x()}));
    const int y0 = std::max<std::int64_t>(0, std::min({r.a.y(), r.b.y(), r.c.y()}));
    const int y1 = std::min<std::int64_t>(cam.height - 1, std::max({r.a.y(), r.b.y(), r.c.y()}));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::int64_t e0 = edge_at(r.a, r.b, x, y);
        const std::int64_t e1 = edge_at(r.b, r.c, x, y);
        const std::int64_t e2 = edge_at(r.c, r.a, x, y);
        if (e0 < 0 || e1 < 0 || e2 < 0) continue;
        if (e0 == 0 && !accepts_tie(r.a, r.b)) continue;
        if (e1 == 0 && !accepts_tie(r.b, r.c)) continue;
        if (e2 == 0 && !accepts_tie(r.c, r.a)) continue;
        if (model.owner.at(x, y) >= 0)
          throw InternalError("prior rasterization: pixel claimed twice");
        assign(r, x, y);
      }
    }
  }

  // Pass 2: hull-boundary pixels the tie rule left out (their perturbed
  // position falls outside the hull); first covering triangle claims them.
  for (const Raster &r : rasters) {
    const int x0 = std::max<std::int64_t>(0, std::min({r.a.x(), r.b.x(), r.c.x()}));
    const int x1 = std::min<std::int64_t>(cam.width - 1, std::max({r.a.x(), r.b.x(), r.c.x()}));
    const int y0 = std::max<std::int64_t>(0, std::min({r.a.y(), r.b.y(), r.c.y()}));
    const int y1 = std::min<std::int64_t>(cam.height - 1, std::max({r.a.y(), r.b.y(), r.c.y()}));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (model.owner.at(x, y) >= 0) continue;
        if (edge_at(r.a, r.b, x, y) < 0 || edge_at(r.b, r.c, x, y) < 0 ||
            edge_at(r.c, r.a, x, y) < 0)
          continue;
        assign(r, x, y);
      }
    }
  }
  return model;
}

double prior_probability(const PlaneHypothesis &theta, double d_p, const Eigen::Vector3d &n_p,
                         double gamma, double lambda_d, double lambda_n) {
  const double dd = theta.depth - d_p;
  const double angle = normal_angle(theta.normal, n_p);
  return gamma + std::exp(-dd * dd / (2.0 * lambda_d)) *
                     std::exp(-angle * angle / (2.0 * lambda_n));
}

double c_p_photo(const PlaneHypothesis &theta, double c, bool has_prior, double d_p,
                 const Eigen::Vector3d &n_p, double alpha, double gamma, double lambda_d,
                 double lambda_n) {
  const double photo = c * c / alpha;
  if (!has_prior) return photo - std::log(1.0 + gamma);
  return photo - std::log(prior_probability(theta, d_p, n_p, gamma, lambda_d, lambda_n));
}

void save_triangulation_off(const Triangulation &tri, const CameraModel &cam,
                            const std::string &path) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << tri.vertices.size() << " " << tri.triangles.size() << " 0\n";
  for (const auto &v : tri.vertices) {
    const Eigen::Vector3d p = unproject(v.pixel.cast<double>(), v.hypothesis.depth, cam);
    out << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
  for (const auto &t : tri.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  write_file_atomic(path, out.str());
}

}  // namespace planarmvs
