#pragma once

#include <Eigen/Dense>

#include "planarmvs/grid.hpp"

namespace planarmvs {

// Per-pixel scalar depth in scene units; 0 encodes invalid.
using DepthMap = Grid<float>;

// Per-pixel unit normal in reference-camera coordinates; zero vector
// encodes invalid.
using NormalMap = Grid<Eigen::Vector3f>;

// Bilinear depth lookup at a continuous pixel position, interpolating in
// inverse depth (exact for planar surfaces, where 1/z is affine in pixel
// coordinates).  Returns 0 when (x, y) is outside the valid interpolation
// window or any participating sample is invalid.
double sample_depth_bilinear(const DepthMap &map, double x, double y);

}  // namespace planarmvs
