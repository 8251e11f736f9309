#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sgp/geometry.hpp"
#include "sgp/kdtree.hpp"
#include "sgp/matching.hpp"

namespace sgp {

struct RansacConfig {
  int max_iterations = 10000;
  double confidence = 0.999;
  double inlier_threshold = 0.07;  // meters; doubles as the TLS bound
  int sample_size = 3;
  uint64_t seed = 0;

  void validate() const;  // throws sgp::Error on invariant violation
};

/// Geometric pseudo-label for one pair, plus the diagnostics verifiers use.
struct TeacherResult {
  RigidTransform transform;
  double inlier_rate = 0.0;
  std::vector<int> inlier_indices;  // into the correspondence list
  int iterations_run = 0;
};

/// Closed-form least-squares alignment of corresponded points: centroids,
/// cross-covariance SVD, determinant-corrected rotation. Returns nullopt on
/// fewer than 3 pairs or a rank-deficient configuration.
std::optional<RigidTransform> horn_solve(const std::vector<std::pair<Vec3, Vec3>>& pairs);

/// Correspondences with registration residual strictly below `threshold`.
std::pair<int, std::vector<int>> count_inliers(const RigidTransform& transform,
                                               const std::vector<Correspondence>& corrs,
                                               const PointCloud& cloud_a,
                                               const PointCloud& cloud_b, double threshold);

/// RANSAC over 3-point Horn samples with confidence-based adaptive stopping
/// and a consensus-set refit. Deterministic per (inputs, cfg.seed). Returns
/// nullopt when no non-degenerate sample yields a model.
std::optional<TeacherResult> ransac_register(const std::vector<Correspondence>& corrs,
                                             const PointCloud& cloud_a, const PointCloud& cloud_b,
                                             const RansacConfig& cfg);

/// Non-robust ablation teacher: one Horn fit over all putative
/// correspondences, no sampling, no trimming.
std::optional<TeacherResult> horn_direct_teacher(const std::vector<Correspondence>& corrs,
                                                 const PointCloud& cloud_a,
                                                 const PointCloud& cloud_b);

struct IcpResult {
  RigidTransform transform;
  int iterations = 0;
  double final_rms = 0.0;  // RMS pairing residual on the last pairing set
  bool refined = false;    // false when no pairings existed at T0
};

/// Point-to-point ICP from T0: pair each point of A with its Euclidean
/// nearest neighbor in B within `dist_threshold`, Horn-fit, repeat until the
/// relative RMS decrease drops below 1e-6 or `max_iter`. `tree_b` must index
/// cloud_b.points.
IcpResult icp_refine(const RigidTransform& t0, const PointCloud& cloud_a,
                     const PointCloud& cloud_b, const KdTree& tree_b, int max_iter,
                     double dist_threshold);

}  // namespace sgp
