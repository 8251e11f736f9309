#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgp/mlp.hpp"
#include "sgp/teacher.hpp"

namespace sgp {

enum class TeacherKind { ransac, horn };

/// All loop hyperparameters. Defaults mirror the registration protocol:
/// RANSAC capped at 10k iterations, 99.9% confidence, 7 cm inlier threshold,
/// 5 cm voxels, overlap threshold 30% for the first two iterations then 10%,
/// 100 epochs at iteration 1 and 50 after, T = 10, finetune, verifier on.
struct SgpConfig {
  int iterations = 10;
  bool retrain = false;
  bool verify_label = true;

  /// (first_iteration, last_iteration, eta); last = 0 means "to T".
  struct EtaSpan {
    int first = 1;
    int last = 0;
    double eta = 0.0;
  };
  std::vector<EtaSpan> eta_schedule{{1, 2, 0.30}, {3, 0, 0.10}};

  RansacConfig ransac;
  LossConfig loss;
  OptimizerSettings optimizer;
  TeacherKind teacher = TeacherKind::ransac;

  double voxel_size = 0.05;
  int normal_k = 30;
  double fpfh_radius_factor = 2.5;  // FPFH radius = factor * voxel_size

  std::vector<int> hidden_dims{64, 64};
  int embedding_dim = 16;
  bool normalize_output = true;

  int epochs_first = 100;
  int epochs_rest = 50;

  int skip_stable_after = 3;
  double skip_inlier_rate = 0.8;

  int icp_max_iterations = 50;

  uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  double eta_for_iteration(int iteration) const;
  std::vector<int> student_dims(int input_dim) const;
  void validate() const;  // throws sgp::Error naming the offending key
};

/// Plain-text key = value lines, '#' comments, unknown keys rejected,
/// missing keys take the defaults above.
SgpConfig load_config(const std::string& path);
SgpConfig parse_config(const std::string& text, const std::string& name);

/// One call per key=value: used by the CLI's --set overrides.
void apply_config_override(SgpConfig& config, const std::string& key, const std::string& value);

/// Canonical snapshot (every key, canonical order); parse(snapshot) == config.
std::string config_to_text(const SgpConfig& config);
void save_config(const SgpConfig& config, const std::string& path);

}  // namespace sgp
