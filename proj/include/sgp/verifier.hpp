#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgp/geometry.hpp"
#include "sgp/kdtree.hpp"

namespace sgp {

/// Per-pair estimated transform plus teacher diagnostics and loop state.
struct PseudoLabel {
  std::string pair_id;
  RigidTransform transform;
  double inlier_rate = 0.0;
  double overlap_ratio = 0.0;
  bool has_model = false;  // false when the teacher produced no model
  bool verified = false;
  int stable_count = 0;
  bool skip = false;
};

/// One metrics row per loop iteration. plir / recalls are absent when no
/// evaluation ground truth was supplied.
struct LoopMetrics {
  int iteration = 0;
  double plsr = 0.0;
  std::optional<double> plir;
  std::optional<double> train_recall;
  std::optional<double> test_recall;
};

/// Fraction of A's points whose position under `transform` has a Euclidean
/// nearest neighbor in B within tau. Directional, A as source. `tree_b`
/// indexes cloud_b.points.
double overlap_ratio(const RigidTransform& transform, const PointCloud& cloud_a,
                     const PointCloud& cloud_b, const KdTree& tree_b, double tau);

/// S = { i : label i has a model and overlap_ratio_i >= eta } (boundary
/// inclusive). Updates the labels' verified flags.
std::vector<int> verify_labels(std::vector<PseudoLabel>& labels, double eta);

/// Pseudo-label survival rate: |S| / M * 100.
double plsr(std::size_t survived, std::size_t total);

struct SuccessTolerance {
  double rotation_deg = 15.0;
  double translation = 0.30;  // meters
};

/// Strict-inequality success test: rotation error < rot tol AND translation
/// error < trans tol.
bool label_correct(const RigidTransform& label, const RigidTransform& ground_truth,
                   const SuccessTolerance& tols);

/// Percentage of verified labels that are correct, over S only. Requires
/// nonempty S. Computed a posteriori; never consumed by the loop.
double plir(const std::vector<int>& survivors, const std::vector<PseudoLabel>& labels,
            const std::vector<RigidTransform>& ground_truth, const SuccessTolerance& tols);

/// Percentage of correct estimates over ALL pairs.
double recall(const std::vector<RigidTransform>& estimates,
              const std::vector<RigidTransform>& ground_truth, const SuccessTolerance& tols);

/// metrics.csv: header iteration,plsr,plir,train_recall,test_recall; empty
/// cells for absent optionals. All numbers locale-independent.
std::string metrics_to_csv(const std::vector<LoopMetrics>& rows);
std::vector<LoopMetrics> metrics_from_csv(const std::string& text);

}  // namespace sgp
