#include "sgp/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgp/errors.hpp"
#include "sgp/rng.hpp"

namespace sgp {

void RansacConfig::validate() const {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(ErrorCode::config, "ransac confidence must lie in (0, 1)");
  if (!(inlier_threshold > 0.0)) throw Error(ErrorCode::config, "ransac inlier_threshold must be positive");
  if (sample_size != 3) throw Error(ErrorCode::config, "ransac sample_size is fixed at 3");
  if (max_iterations < 1) throw Error(ErrorCode::config, "ransac max_iterations must be >= 1");
}

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

std::optional<RigidTransform> horn_solve(const std::vector<std::pair<Vec3, Vec3>>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) return std::nullopt;

  Vec3 mean_p = Vec3::Zero();
  Vec3 mean_q = Vec3::Zero();
  for (const auto& [p, q] : pairs) {
    mean_p += p;
    mean_q += q;
  }
  mean_p /= static_cast<double>(n);
  mean_q /= static_cast<double>(n);

  Mat3 cross_cov = Mat3::Zero();
  for (const auto& [p, q] : pairs) {
    cross_cov += (p - mean_p) * (q - mean_q).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(cross_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  // Collinear sources leave a rotation axis free: reject when the second
  // singular value vanishes relative to the first.
  if (sigma[1] < 1e-12 * sigma[0] || sigma[0] == 0.0) return std::nullopt;

  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Mat3 rotation = svd.matrixV() * d * svd.matrixU().transpose();

  // Gauss-Newton polish on the centered rotation-only problem. The SVD
  // construction alone can be ~1e-8 rad off the least-squares optimum when
  // two singular values nearly coincide; two quadratic steps reach machine
  // precision.
  for (int step = 0; step < 2; ++step) {
    Mat3 normal = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const auto& [p, q] : pairs) {
      const Vec3 rp = rotation * (p - mean_p);
      const Mat3 jac = -skew(rp);
      normal.noalias() += jac.transpose() * jac;
      rhs.noalias() += jac.transpose() * ((q - mean_q) - rp);
    }
    const Vec3 delta = normal.ldlt().solve(rhs);
    if (!delta.allFinite()) break;
    const double angle = delta.norm();
    if (angle == 0.0) break;
    rotation = Eigen::AngleAxisd(angle, delta / angle).toRotationMatrix() * rotation;
  }
  rotation = orthonormalized(rotation);

  RigidTransform out;
  out.rotation = rotation;
  out.translation = mean_q - rotation * mean_p;
  return out;
}

std::pair<int, std::vector<int>> count_inliers(const RigidTransform& transform,
                                               const std::vector<Correspondence>& corrs,
                                               const PointCloud& cloud_a,
                                               const PointCloud& cloud_b, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::invalid_argument, "count_inliers: threshold must be positive");
  std::vector<int> inliers;
  inliers.reserve(corrs.size());
  for (std::size_t k = 0; k < corrs.size(); ++k) {
    const Vec3& p = cloud_a.points[corrs[k].index_a];
    const Vec3& q = cloud_b.points[corrs[k].index_b];
    if (registration_residual(transform, p, q) < threshold) inliers.push_back(static_cast<int>(k));
  }
  return {static_cast<int>(inliers.size()), std::move(inliers)};
}

namespace {

std::vector<std::pair<Vec3, Vec3>> gather_pairs(const std::vector<Correspondence>& corrs,
                                                const std::vector<int>& subset,
                                                const PointCloud& cloud_a,
                                                const PointCloud& cloud_b) {
  std::vector<std::pair<Vec3, Vec3>> pairs;
  pairs.reserve(subset.size());
  for (int k : subset) {
    pairs.emplace_back(cloud_a.points[corrs[k].index_a], cloud_b.points[corrs[k].index_b]);
  }
  return pairs;
}

int adaptive_bound(double inlier_rate, double confidence, int max_iterations) {
  if (inlier_rate >= 1.0) return 1;
  const double w3 = inlier_rate * inlier_rate * inlier_rate;
  if (w3 <= 0.0) return max_iterations;
  const double denom = std::log(1.0 - w3);
  if (denom == 0.0) return max_iterations;
  const double bound = std::log(1.0 - confidence) / denom;
  if (!std::isfinite(bound) || bound >= static_cast<double>(max_iterations)) return max_iterations;
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

}  // namespace

std::optional<TeacherResult> ransac_register(const std::vector<Correspondence>& corrs,
                                             const PointCloud& cloud_a, const PointCloud& cloud_b,
                                             const RansacConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(corrs.size());
  if (n < 3) return std::nullopt;

  Rng rng(cfg.seed);
  int best_count = 0;
  std::vector<int> best_inliers;
  RigidTransform best_transform;
  bool has_model = false;

  int bound = cfg.max_iterations;
  int iterations = 0;
  std::vector<int> sample(3);
  while (iterations < bound) {
    ++iterations;
    sample[0] = static_cast<int>(rng.uniform_int(n));
    do {
      sample[1] = static_cast<int>(rng.uniform_int(n));
    } while (sample[1] == sample[0]);
    do {
      sample[2] = static_cast<int>(rng.uniform_int(n));
    } while (sample[2] == sample[0] || sample[2] == sample[1]);

    const auto model = horn_solve(gather_pairs(corrs, sample, cloud_a, cloud_b));
    if (!model) continue;

    auto [count, inliers] = count_inliers(*model, corrs, cloud_a, cloud_b, cfg.inlier_threshold);
    if (count > best_count || !has_model) {
      has_model = true;
      best_count = count;
      best_inliers = std::move(inliers);
      best_transform = *model;
      bound = std::min(bound, adaptive_bound(static_cast<double>(count) / n, cfg.confidence,
                                             cfg.max_iterations));
    }
  }
  if (!has_model) return std::nullopt;

  // Refit on the consensus set, then recompute the set under the refit model.
  if (best_count >= 3) {
    if (const auto refit = horn_solve(gather_pairs(corrs, best_inliers, cloud_a, cloud_b))) {
      best_transform = *refit;
      auto [count, inliers] = count_inliers(best_transform, corrs, cloud_a, cloud_b, cfg.inlier_threshold);
      best_count = count;
      best_inliers = std::move(inliers);
    }
  }

  TeacherResult result;
  result.transform = best_transform;
  result.inlier_rate = static_cast<double>(best_count) / n;
  result.inlier_indices = std::move(best_inliers);
  result.iterations_run = iterations;
  return result;
}

std::optional<TeacherResult> horn_direct_teacher(const std::vector<Correspondence>& corrs,
                                                 const PointCloud& cloud_a,
                                                 const PointCloud& cloud_b) {
  const int n = static_cast<int>(corrs.size());
  if (n < 3) return std::nullopt;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const auto model = horn_solve(gather_pairs(corrs, all, cloud_a, cloud_b));
  if (!model) return std::nullopt;

  TeacherResult result;
  result.transform = *model;
  // Diagnostics only; the ablation teacher itself never trims.
  auto [count, inliers] = count_inliers(*model, corrs, cloud_a, cloud_b, 0.07);
  result.inlier_rate = static_cast<double>(count) / n;
  result.inlier_indices = std::move(inliers);
  result.iterations_run = 1;
  return result;
}

IcpResult icp_refine(const RigidTransform& t0, const PointCloud& cloud_a,
                     const PointCloud& cloud_b, const KdTree& tree_b, int max_iter,
                     double dist_threshold) {
  if (cloud_a.empty() || cloud_b.empty())
    throw Error(ErrorCode::invalid_argument, "icp_refine: clouds must be nonempty");
  if (!(dist_threshold > 0.0))
    throw Error(ErrorCode::invalid_argument, "icp_refine: dist_threshold must be positive");

  IcpResult result;
  result.transform = t0;

  const double threshold_sq = dist_threshold * dist_threshold;
  std::vector<std::pair<Vec3, Vec3>> pairs;
  double prev_rms = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    pairs.clear();
    for (const Vec3& p : cloud_a.points) {
      const Vec3 moved = result.transform.apply(p);
      const KdTree::Hit hit = tree_b.nearest(moved);
      if (hit.sq_dist <= threshold_sq) pairs.emplace_back(p, cloud_b.points[hit.index]);
    }
    if (pairs.size() < 3) break;

    const auto fit = horn_solve(pairs);
    if (!fit) break;

    double sum_sq = 0.0;
    for (const auto& [p, q] : pairs) {
      const double r = registration_residual(*fit, p, q);
      sum_sq += r * r;
    }
    const double rms = std::sqrt(sum_sq / static_cast<double>(pairs.size()));

    result.transform = *fit;
    result.final_rms = rms;
    result.refined = true;
    result.iterations = iter + 1;

    if (prev_rms - rms < 1e-6 * std::max(prev_rms, 1e-12)) break;
    prev_rms = rms;
  }
  return result;
}

}  // namespace sgp
