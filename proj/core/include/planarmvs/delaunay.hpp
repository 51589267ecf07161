#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace planarmvs {

// Delaunay triangulation of integer pixel coordinates (Bowyer-Watson with a
// ghost-vertex hull, exact integer incircle/orientation predicates).
//
// Returned triples index into `points` and are oriented counterclockwise in
// pixel coordinates (positive signed area with the usual (x, y) cross
// product); the list is canonically ordered, and the result is a pure
// function of the point set (insertion happens in (y, x) sorted order).
//
// Throws ValidationError on duplicate points or fewer than 3 points, and
// InsufficientSupportError when all points are collinear.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Eigen::Vector2i> &points);

}  // namespace planarmvs
