#include "planarmvs/depth_map.hpp"

#include <cmath>

namespace planarmvs {

double sample_depth_bilinear(const DepthMap &map, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0) || !(x <= map.width() - 1.0) || !(y <= map.height() - 1.0))
    return 0.0;
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  if (x0 == map.width() - 1) --x0;
  if (y0 == map.height() - 1) --y0;
  if (map.width() == 1) x0 = 0;
  if (map.height() == 1) y0 = 0;
  const int x1 = std::min(x0 + 1, map.width() - 1);
  const int y1 = std::min(y0 + 1, map.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;

  const float d00 = map.at(x0, y0), d10 = map.at(x1, y0);
  const float d01 = map.at(x0, y1), d11 = map.at(x1, y1);
  if (d00 <= 0.0f || d10 <= 0.0f || d01 <= 0.0f || d11 <= 0.0f) return 0.0;

  const double inv = (1.0 - fy) * ((1.0 - fx) / d00 + fx / d10) +
                     fy * ((1.0 - fx) / d01 + fx / d11);
  if (!(inv > 0.0)) return 0.0;
  return 1.0 / inv;
}

}  // namespace planarmvs
