#pragma once

#include <array>
#include <string>
#include <vector>

#include "planarmvs/camera.hpp"
#include "planarmvs/geometry.hpp"
#include "planarmvs/grid.hpp"
#include "planarmvs/hypothesis_map.hpp"

namespace planarmvs {

// A pixel whose final photometric-phase cost fell below the credibility
// threshold, together with the hypothesis it held.
struct CrediblePoint {
  Eigen::Vector2i pixel;
  PlaneHypothesis hypothesis;
  double cost = 0.0;
};
using CredibleSet = std::vector<CrediblePoint>;

struct Triangulation {
  CredibleSet vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW (positive cross product)
};

// Per-pixel planar prior; depth 0 encodes "no prior here" (outside the
// triangulated hull or under a degenerate triangle).  `owner` records the
// assigning triangle per pixel (-1 when none); rasterization assigns every
// pixel to at most one triangle.
struct PriorModel {
  Grid<double> depth;
  Grid<Eigen::Vector3d> normal;
  Grid<std::int32_t> owner;

  bool has(int x, int y) const { return depth.at(x, y) > 0.0; }
};

// Pixels with cost < epsilon.  When more than a quarter of all pixels
// qualify, only the cheapest point per 2x2 cell is kept (ties: scanline
// order), bounding the triangulation size.  Throws InsufficientSupportError
// when fewer than 3 pixels qualify.
CredibleSet select_credible(const HypothesisMap &map, double epsilon);

// Delaunay triangulation of the credible pixels (see delaunay.hpp for the
// determinism and exactness guarantees).
Triangulation triangulate_credible(const CredibleSet &credible);

// Fits a camera-frame plane through each triangle's unprojected vertices and
// rasterizes it: every covered pixel gets the triangle normal and the
// per-pixel ray-plane intersection depth clamped to the camera's depth
// range.  Degenerate triangles (3D-collinear vertices, plane edge-on to a
// pixel ray) contribute no prior.  Interior ties resolve by a fixed
// antisymmetric edge rule; hull-boundary pixels the rule leaves unassigned
// are claimed by the first covering triangle in list order.
PriorModel build_prior_model(const Triangulation &tri, const CameraModel &cam);

// Planar-prior probability (gamma-offset bivariate kernel):
//   gamma + exp(-(d_i - d_p)^2 / (2 lambda_d)) * exp(-acos^2(n_i . n_p) / (2 lambda_n))
double prior_probability(const PlaneHypothesis &theta, double d_p, const Eigen::Vector3d &n_p,
                         double gamma, double lambda_d, double lambda_n);

// Planar-prior assisted aggregated cost: c^2/alpha - log(prior probability),
// i.e. exactly -log(likelihood * prior).  Pixels without a prior fall back
// to the constant prior 1 + gamma, preserving pure photometric ranking.
double c_p_photo(const PlaneHypothesis &theta, double c, bool has_prior, double d_p,
                 const Eigen::Vector3d &n_p, double alpha, double gamma, double lambda_d,
                 double lambda_n);

// ASCII OFF dump of the triangulation (camera-frame vertex positions).
void save_triangulation_off(const Triangulation &tri, const CameraModel &cam,
                            const std::string &path);

}  // namespace planarmvs
