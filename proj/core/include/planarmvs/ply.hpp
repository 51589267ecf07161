#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace planarmvs {

struct PointCloud {
  std::vector<Eigen::Vector3f> positions;
  std::vector<Eigen::Vector3f> normals;              // empty or one per point
  std::vector<std::array<std::uint8_t, 3>> colors;   // empty or one per point

  std::size_t size() const { return positions.size(); }
};

// Binary little-endian PLY with per-vertex x, y, z, nx, ny, nz (float32) and
// red, green, blue (uchar).  Missing normals are written as zeros, missing
// colors as mid-gray.  The file is written atomically.
void save_ply(const PointCloud &cloud, const std::string &path);

// Reads ascii or binary little-endian PLY vertex data.  x/y/z are required;
// nx/ny/nz and red/green/blue are picked up when present; other properties
// are skipped.  Throws IoError on malformed headers or truncated payloads.
PointCloud load_ply(const std::string &path);

}  // namespace planarmvs
