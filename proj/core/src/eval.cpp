#include "planarmvs/eval.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "planarmvs/errors.hpp"
#include "planarmvs/rng.hpp"

namespace planarmvs {

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey &o) const { return x == o.x && y == o.y && z == o.z; }
};

struct CellHash {
  std::size_t operator()(const CellKey &k) const {
    std::uint64_t s = static_cast<std::uint64_t>(k.x);
    std::uint64_t h = splitmix64(s);
    s ^= static_cast<std::uint64_t>(k.y) + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= static_cast<std::uint64_t>(k.z) + 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    return static_cast<std::size_t>(h);
  }
};

// Exact within-tau test: every point within tau of a query lies in one of
// the 27 cells around the query's cell when the cell edge equals tau.
class PointGrid {
 public:
  PointGrid(const std::vector<Eigen::Vector3f> &points, double tau)
      : points_(points), inv_tau_(1.0 / tau) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      cells_[cell_of(points[i])].push_back(static_cast<int>(i));
  }

  bool has_within(const Eigen::Vector3f &q, double tau) const {
    const double tau2 = tau * tau;
    const CellKey c = cell_of(q);
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) continue;
          for (const int i : it->second) {
            const Eigen::Vector3d d = (points_[i] - q).cast<double>();
            if (d.squaredNorm() <= tau2) return true;
          }
        }
    return false;
  }

 private:
  CellKey cell_of(const Eigen::Vector3f &p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() * inv_tau_)),
            static_cast<std::int64_t>(std::floor(p.y() * inv_tau_)),
            static_cast<std::int64_t>(std::floor(p.z() * inv_tau_))};
  }

  const std::vector<Eigen::Vector3f> &points_;
  double inv_tau_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

void check_depth_inputs(const DepthMap &est, const DepthMap &gt) {
  if (est.width() != gt.width() || est.height() != gt.height())
    throw ValidationError("eval: estimate and GT dimensions differ");
}

std::size_t count_valid(const DepthMap &gt) {
  std::size_t n = 0;
  for (const float d : gt)
    if (d > 0.0f) ++n;
  if (n == 0) throw ValidationError("eval: GT depth map has no valid pixels");
  return n;
}

}  // namespace

DepthMetrics depth_metrics(const DepthMap &est, const DepthMap &gt,
                           std::vector<double> thresholds) {
  check_depth_inputs(est, gt);
  DepthMetrics m;
  m.thresholds = std::move(thresholds);
  m.valid_gt_pixels = count_valid(gt);
  m.fractions.assign(m.thresholds.size(), 0.0);
  std::vector<std::size_t> hits(m.thresholds.size(), 0);
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      const float g = gt.at(x, y);
      if (!(g > 0.0f)) continue;
      const float e = est.at(x, y);
      const double err = e > 0.0f ? std::abs(static_cast<double>(e) - g)
                                  : std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m.thresholds.size(); ++k)
        if (err < m.thresholds[k]) ++hits[k];
    }
  }
  for (std::size_t k = 0; k < m.thresholds.size(); ++k)
    m.fractions[k] = static_cast<double>(hits[k]) / static_cast<double>(m.valid_gt_pixels);
  return m;
}

double relative_error_fraction(const DepthMap &est, const DepthMap &gt, double rel) {
  check_depth_inputs(est, gt);
  const std::size_t valid = count_valid(gt);
  std::size_t hits = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      const float g = gt.at(x, y);
      if (!(g > 0.0f)) continue;
      const float e = est.at(x, y);
      if (e > 0.0f && std::abs(static_cast<double>(e) - g) / g < rel) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(valid);
}

CloudMetrics cloud_metrics(const PointCloud &est, const PointCloud &gt, double tau) {
  if (est.positions.empty() || gt.positions.empty())
    throw ValidationError("eval: point clouds must be non-empty");
  if (!(tau > 0.0)) throw ValidationError("eval: tau must be positive");

  CloudMetrics m;
  m.tau = tau;
  {
    const PointGrid grid(gt.positions, tau);
    std::size_t hits = 0;
    for (const auto &p : est.positions)
      if (grid.has_within(p, tau)) ++hits;
    m.accuracy = static_cast<double>(hits) / static_cast<double>(est.positions.size());
  }
  {
    const PointGrid grid(est.positions, tau);
    std::size_t hits = 0;
    for (const auto &p : gt.positions)
      if (grid.has_within(p, tau)) ++hits;
    m.completeness = static_cast<double>(hits) / static_cast<double>(gt.positions.size());
  }
  const double sum = m.accuracy + m.completeness;
  m.f1 = sum > 0.0 ? 2.0 * m.accuracy * m.completeness / sum : 0.0;
  return m;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string report_kv(const DepthMetrics &m) {
  std::ostringstream os;
  os << "valid_gt_pixels=" << m.valid_gt_pixels << "\n";
  for (std::size_t k = 0; k < m.thresholds.size(); ++k)
    os << "fraction_below_" << fmt(m.thresholds[k]) << "=" << fmt(m.fractions[k]) << "\n";
  return os.str();
}

std::string report_json(const DepthMetrics &m) {
  std::ostringstream os;
  os << "{\n  \"valid_gt_pixels\": " << m.valid_gt_pixels << ",\n  \"thresholds\": [";
  for (std::size_t k = 0; k < m.thresholds.size(); ++k)
    os << (k ? ", " : "") << fmt(m.thresholds[k]);
  os << "],\n  \"fractions\": [";
  for (std::size_t k = 0; k < m.fractions.size(); ++k)
    os << (k ? ", " : "") << fmt(m.fractions[k]);
  os << "]\n}\n";
  return os.str();
}

std::string report_kv(const CloudMetrics &m) {
  std::ostringstream os;
  os << "tau=" << fmt(m.tau) << "\naccuracy=" << fmt(m.accuracy)
     << "\ncompleteness=" << fmt(m.completeness) << "\nf1=" << fmt(m.f1) << "\n";
  return os.str();
}

std::string report_json(const CloudMetrics &m) {
  std::ostringstream os;
  os << "{\n  \"tau\": " << fmt(m.tau) << ",\n  \"accuracy\": " << fmt(m.accuracy)
     << ",\n  \"completeness\": " << fmt(m.completeness) << ",\n  \"f1\": " << fmt(m.f1)
     << "\n}\n";
  return os.str();
}

}  // namespace planarmvs
