#include "planarmvs/photometric.hpp"

#include <algorithm>
#include <cmath>

#include "planarmvs/errors.hpp"

namespace planarmvs {

void PatchSpec::validate() const {
  if (radius < 1) throw ValidationError("patch: radius must be >= 1");
  if (step < 1) throw ValidationError("patch: step must be >= 1");
  const int n = samples_per_axis();
  if (n * n < 9) throw ValidationError("patch: window must contain at least 9 samples");
}

double matching_cost(const Eigen::Vector2i &pixel, const PlaneHypothesis &theta,
                     const ImageF &ref_img, const ImageF &src_img, const CameraModel &cam_ref,
                     const CameraModel &cam_src, const PatchSpec &spec) {
  return matching_cost(pixel, theta, ref_img, src_img, cam_ref, relative_pose(cam_ref, cam_src),
                       cam_src, spec);
}

double matching_cost(const Eigen::Vector2i &pixel, const PlaneHypothesis &theta,
                     const ImageF &ref_img, const ImageF &src_img, const CameraModel &cam_ref,
                     const RelativePose &rel, const CameraModel &cam_src, const PatchSpec &spec) {
  Eigen::Matrix3d H;
  if (!try_homography_from_hypothesis(theta, pixel.cast<double>(), cam_ref, rel, cam_src, &H))
    return 2.0;

  const int rw = ref_img.width(), rh = ref_img.height();
  const double sw = src_img.width() - 1.0, sh = src_img.height() - 1.0;
  double sum_r = 0.0, sum_s = 0.0, sum_rr = 0.0, sum_ss = 0.0, sum_rs = 0.0;
  int n = 0;
  for (int oy = -spec.radius; oy <= spec.radius; oy += spec.step) {
    const int ry = pixel.y() + oy;
    if (ry < 0 || ry >= rh) continue;
    for (int ox = -spec.radius; ox <= spec.radius; ox += spec.step) {
      const int rx = pixel.x() + ox;
      if (rx < 0 || rx >= rw) continue;
      const Eigen::Vector3d mapped = H * Eigen::Vector3d(rx, ry, 1.0);
      if (!(mapped.z() > 1e-12)) return 2.0;
      const double sx = mapped.x() / mapped.z();
      const double sy = mapped.y() / mapped.z();
      if (!(sx >= 0.0 && sx <= sw && sy >= 0.0 && sy <= sh)) return 2.0;
      const double r = ref_img.at(rx, ry);
      const double s = sample_bilinear(src_img, sx, sy);
      sum_r += r;
      sum_s += s;
      sum_rr += r * r;
      sum_ss += s * s;
      sum_rs += r * s;
      ++n;
    }
  }
  if (n < 9) return 2.0;
  const double inv_n = 1.0 / n;
  const double var_r = sum_rr * inv_n - (sum_r * inv_n) * (sum_r * inv_n);
  const double var_s = sum_ss * inv_n - (sum_s * inv_n) * (sum_s * inv_n);
  if (var_r < 1e-10 || var_s < 1e-10) return 2.0;
  const double cov = sum_rs * inv_n - (sum_r * inv_n) * (sum_s * inv_n);
  const double ncc = std::clamp(cov / std::sqrt(var_r * var_s), -1.0, 1.0);
  return 1.0 - ncc;
}

double init_aggregate(const std::vector<double> &costs, int k) {
  if (costs.empty()) throw ValidationError("init_aggregate: empty cost list");
  k = std::clamp(k, 1, static_cast<int>(costs.size()));
  std::vector<double> sorted(costs);
  std::partial_sort(sorted.begin(), sorted.begin() + k, sorted.end());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += sorted[i];
  return sum / k;
}

ViewWeights view_selection(const std::vector<std::vector<double>> &m_costs,
                           const std::vector<std::pair<int, int>> &neighbor_vis, double sigma,
                           double eta) {
  const std::size_t n_src = m_costs.size();
  ViewWeights out;
  out.w.assign(n_src, 0.0);
  out.vis.assign(n_src, 0);
  if (n_src == 0) return out;

  const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> score(n_src, 0.0);
  for (std::size_t j = 0; j < n_src; ++j) {
    const auto &row = m_costs[j];
    double photo = 0.0;
    for (const double m : row) photo += std::exp(-m * m * inv_2s2);
    photo = row.empty() ? 0.0 : photo / static_cast<double>(row.size());

    double smooth = 1.0;
    if (j < neighbor_vis.size() && neighbor_vis[j].second > 0) {
      const auto [visible, total] = neighbor_vis[j];
      smooth = (visible * eta + (total - visible) * (1.0 - eta)) / total;
    }
    score[j] = photo * smooth;
  }

  const double best = *std::max_element(score.begin(), score.end());
  if (best > 0.0) {
    for (std::size_t j = 0; j < n_src; ++j) {
      out.w[j] = score[j] / best;
      out.vis[j] = out.w[j] >= 0.2 ? 1 : 0;
    }
  } else {
    // Degenerate underflow: keep the single best-scoring source.
    const std::size_t j =
        static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
    out.w[j] = 1.0;
    out.vis[j] = 1;
  }
  return out;
}

double c_photo(const ViewWeights &weights, const std::vector<double> &m_row) {
  double num = 0.0, den = 0.0;
  const std::size_t n = std::min(weights.w.size(), m_row.size());
  for (std::size_t j = 0; j < n; ++j) {
    num += weights.w[j] * m_row[j];
    den += weights.w[j];
  }
  if (!(den > 0.0)) throw ValidationError("c_photo: all view weights are zero");
  return num / den;
}

double likelihood(double c, double alpha) { return std::exp(-c * c / alpha); }

}  // namespace planarmvs
