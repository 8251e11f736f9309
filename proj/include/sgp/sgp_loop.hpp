#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgp/config.hpp"
#include "sgp/datagen.hpp"
#include "sgp/kdtree.hpp"
#include "sgp/mlp.hpp"
#include "sgp/verifier.hpp"

namespace sgp {

/// A pair after preprocessing: voxel-downsampled clouds with normals and
/// FPFH input histograms, plus the cached Euclidean index of cloud B.
/// Everything downstream (bootstrap, relabeling, training, evaluation)
/// reuses this — FPFH inputs are fixed across loop iterations.
struct PreparedPair {
  std::string id;
  PointCloud cloud_a;  // descriptors hold the FPFH histograms
  PointCloud cloud_b;
  std::vector<int> active_a;  // nonzero-FPFH points, eligible for matching
  std::vector<int> active_b;
  KdTree tree_b;
  HiddenTransform ground_truth;
};

PreparedPair prepare_pair(const DatasetPair& pair, const SgpConfig& cfg);
std::vector<PreparedPair> prepare_pairs(const std::vector<DatasetPair>& pairs, const SgpConfig& cfg);

/// Teacher pass over one pair given per-active-point embeddings:
/// match_nn both ways, cross check, robust registration, ICP refinement,
/// overlap diagnostic.
struct LabelOutcome {
  RigidTransform transform;
  double inlier_rate = 0.0;
  double overlap_ratio = 0.0;
  bool has_model = false;
};
LabelOutcome label_pair(const PreparedPair& pair, const std::vector<Eigen::VectorXd>& emb_a,
                        const std::vector<Eigen::VectorXd>& emb_b, const SgpConfig& cfg,
                        uint64_t teacher_seed);

/// Embeddings of the active points of a cloud under the student.
std::vector<Eigen::VectorXd> embed_active(const MlpDescriptor& model, const PointCloud& cloud,
                                          const std::vector<int>& active);

/// Pass-through model (identity layer, no normalization) whose embedding
/// equals the raw input histogram; registers exactly like the bootstrap
/// matcher.
MlpDescriptor identity_model(int dim);

/// Initial labeling with the bootstrap matcher (raw FPFH + cross check).
std::vector<PseudoLabel> bootstrap(const std::vector<PreparedPair>& pairs, const SgpConfig& cfg);

/// Registration recall of `model` + the robust teacher over eval pairs
/// (hidden ground truth required on all of them).
double evaluate(const MlpDescriptor& model, const std::vector<PreparedPair>& eval_pairs,
                const SgpConfig& cfg);

struct SgpRunResult {
  MlpDescriptor final_model;
  std::optional<MlpDescriptor> best_model;  // only when a validation split is given
  std::vector<PseudoLabel> labels;
  std::vector<LoopMetrics> metrics;                 // one row per iteration 1..T
  std::vector<MlpDescriptor> iteration_models;      // theta^(1) .. theta^(T)
  std::optional<double> bootstrap_train_recall;
  std::optional<double> bootstrap_test_recall;
  std::vector<std::string> diagnostics;
};

/// Algorithm: bootstrap labels, then T rounds of verify -> train -> relabel
/// with retrain/finetune switching and the stable-label skip rule.
/// Deterministic per (dataset, cfg): identical runs give bit-identical
/// metrics.
SgpRunResult run_sgp(const std::vector<PreparedPair>& train,
                     const std::vector<PreparedPair>* test,
                     const std::vector<PreparedPair>* validation, const SgpConfig& cfg);

}  // namespace sgp
