#pragma once

#include <string>
#include <vector>

#include "planarmvs/depth_map.hpp"
#include "planarmvs/ply.hpp"

namespace planarmvs {

// Fraction of GT-valid pixels whose absolute depth error falls below each
// threshold.  Pixels with an invalid estimate count as errors.
struct DepthMetrics {
  std::vector<double> thresholds;
  std::vector<double> fractions;   // parallel to thresholds
  std::size_t valid_gt_pixels = 0;
};

struct CloudMetrics {
  double accuracy = 0.0;      // estimated points within tau of some GT point
  double completeness = 0.0;  // GT points within tau of some estimated point
  double f1 = 0.0;            // 2ac/(a+c), 0 when both are 0
  double tau = 0.0;
};

// Throws ValidationError on dimension mismatch or when GT has no valid pixel.
DepthMetrics depth_metrics(const DepthMap &est, const DepthMap &gt,
                           std::vector<double> thresholds);

// Fraction of GT-valid pixels with |est - gt| / gt < rel (invalid estimates
// count as errors); same validity rules as depth_metrics.
double relative_error_fraction(const DepthMap &est, const DepthMap &gt, double rel);

// Bidirectional nearest-neighbor metrics at distance threshold tau
// (inclusive).  Neighbor search uses a uniform spatial grid but is exact.
// Throws ValidationError when either cloud is empty or tau <= 0.
CloudMetrics cloud_metrics(const PointCloud &est, const PointCloud &gt, double tau);

// Flat key=value report (one metric per line) and a JSON rendering of the
// same data.
std::string report_kv(const DepthMetrics &m);
std::string report_json(const DepthMetrics &m);
std::string report_kv(const CloudMetrics &m);
std::string report_json(const CloudMetrics &m);

}  // namespace planarmvs
