#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgp/geometry.hpp"
#include "sgp/kdtree.hpp"

namespace sgp {

/// Student descriptor: a small perceptron mapping a geometric input
/// histogram to a d_F-dimensional embedding. Hidden layers are
/// rectified-linear, the output layer is affine, optionally followed by L2
/// normalization onto the unit sphere.
struct MlpDescriptor {
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is (out_dim x in_dim)
  std::vector<Eigen::VectorXd> biases;
  bool normalize_output = true;

  int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
  int output_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.back().rows()); }
  std::size_t layer_count() const { return weights.size(); }

  void validate() const;  // dimension chaining + finiteness
};

enum class InitMode { fresh, from_model };

/// fresh: Glorot-uniform weights, zero biases, seeded. from_model: copy.
MlpDescriptor init_weights(const std::vector<int>& dims, uint64_t seed, InitMode mode,
                           const MlpDescriptor* source = nullptr, bool normalize_output = true);

/// Forward pass. `zero_flag`, when given, is set when the pre-normalization
/// output was exactly zero (the embedding is then the fixed unit vector e1).
Eigen::VectorXd mlp_forward(const MlpDescriptor& model, const Eigen::VectorXd& input,
                            bool* zero_flag = nullptr);

/// Column-batched forward pass: inputs and embeddings as matrix columns.
Eigen::MatrixXd mlp_forward_batch(const MlpDescriptor& model, const Eigen::MatrixXd& inputs,
                                  std::vector<char>* zero_flags = nullptr);

/// Margins and weights of the hinge-squared contrastive + triplet loss.
struct LossConfig {
  double margin_positive = 0.1;   // m_p
  double margin_negative = 1.4;   // m_n
  double margin_triplet = 0.5;    // m
  double lambda_positive = 1.0;
  double lambda_negative = 1.0;
  double lambda_triplet = 1.0;
  int negatives_per_anchor = 4;

  void validate(bool normalized_embeddings) const;
};

/// Matched/unmatched training sets for one cloud pair. Histograms are stored
/// by value; the index triplets are kept for auditing and equivariance tests.
struct TrainingBatch {
  std::vector<Eigen::VectorXd> anchors;
  std::vector<Eigen::VectorXd> positives;
  std::vector<std::vector<Eigen::VectorXd>> negatives;  // per anchor
  std::vector<int> anchor_indices;                      // into cloud A
  std::vector<int> positive_indices;                    // into cloud B
  std::vector<std::vector<int>> negative_indices;       // into cloud B

  std::size_t size() const { return anchors.size(); }
  bool empty() const { return anchors.empty(); }
};

/// Correspondence generation from a pseudo-label: each point of A whose
/// transformed position has a Euclidean nearest neighbor in B closer than
/// c_bar becomes an anchor with that neighbor as positive; negatives are
/// drawn uniformly (seeded) from B points at distance >= 2*c_bar from the
/// transformed anchor. Anchors with no admissible negative are dropped.
/// `tree_b` must index cloud_b.points.
TrainingBatch generate_training_pairs(const PointCloud& cloud_a, const PointCloud& cloud_b,
                                      const KdTree& tree_b, const RigidTransform& label,
                                      double c_bar, const LossConfig& cfg, uint64_t seed);

/// Sum over batch anchors of the three hinge-squared terms. Zero exactly
/// when every margin constraint holds.
double mlp_loss(const MlpDescriptor& model, const TrainingBatch& batch, const LossConfig& cfg);

struct MlpGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void scale(double factor);
};

/// Analytic gradient of mlp_loss with respect to every weight and bias.
/// Returns the loss value alongside.
double mlp_loss_gradient(const MlpDescriptor& model, const TrainingBatch& batch,
                         const LossConfig& cfg, MlpGradient& grad);

struct OptimizerSettings {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int max_anchors_per_pair = 256;  // per-epoch anchor subsample; 0 = all
};

/// One training pair as seen by the student: precomputed input histograms
/// plus the pseudo-label transform driving correspondence generation.
struct StudentPair {
  std::string pair_id;
  const PointCloud* cloud_a = nullptr;  // carries input histograms in descriptors
  const PointCloud* cloud_b = nullptr;
  const KdTree* tree_b = nullptr;
  RigidTransform label;
};

struct TrainStats {
  double first_epoch_mean_loss = 0.0;
  double last_epoch_mean_loss = 0.0;
  int batches_skipped_empty = 0;
  std::vector<std::string> consumed_pair_ids;  // audit: must be within S
};

/// Mini-batch SGD (one pair's anchors per step, mean-loss gradient) over
/// shuffled pairs. Deterministic per (inputs, seed). Throws on non-finite
/// loss.
MlpDescriptor train_student(const MlpDescriptor& init, const std::vector<StudentPair>& pairs,
                            int epochs, const OptimizerSettings& opt, const LossConfig& loss_cfg,
                            double c_bar, uint64_t seed, TrainStats* stats = nullptr);

/// Binary checkpoint ("SGPMLP1"): layer count and shapes as little-endian
/// u32, row-major little-endian f64 weights then biases per layer, one flags
/// byte (bit 0 = normalize_output). read(write(m)) == m bit-exactly.
void save_model(const MlpDescriptor& model, const std::string& path);
MlpDescriptor load_model(const std::string& path);
void write_model(const MlpDescriptor& model, std::ostream& out);
MlpDescriptor read_model(std::istream& in);

}  // namespace sgp
