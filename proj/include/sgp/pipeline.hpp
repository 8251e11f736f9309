#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgp/config.hpp"
#include "sgp/datagen.hpp"
#include "sgp/sgp_loop.hpp"
#include "sgp/verifier.hpp"

namespace sgp {

/// Loads a dataset manifest and its PLY clouds.
std::vector<DatasetPair> load_dataset_pairs(const std::string& manifest_path);

/// labels.csv: pair_id, 12 transform entries (row-major R then t),
/// inlier_rate, overlap_ratio, verified, skip.
void save_labels(const std::vector<PseudoLabel>& labels, const std::string& path);
std::vector<PseudoLabel> load_labels(const std::string& path);

/// Run directory layout: config.txt snapshot, labels.csv (final labels),
/// metrics.csv, bootstrap.csv (pre-loop recalls), model_iter_NNN.sgpmlp
/// checkpoints.
void write_run_directory(const SgpRunResult& result, const SgpConfig& cfg, const std::string& dir);

/// Full loop from manifest files. test/validation manifests optional; the
/// run directory is written when `run_dir` is nonempty.
SgpRunResult run_sgp_files(const std::string& train_manifest, const std::string& test_manifest,
                           const std::string& validation_manifest, const SgpConfig& cfg,
                           const std::string& run_dir);

/// Bootstrap labels only; writes them as labels.csv when out path nonempty.
std::vector<PseudoLabel> bootstrap_files(const std::string& train_manifest, const SgpConfig& cfg,
                                         const std::string& out_labels_csv);

struct RegisterOutcome {
  RigidTransform transform;
  double inlier_rate = 0.0;
  double overlap_ratio = 0.0;
};

/// Registers one pair of PLY files; with an empty model path the bootstrap
/// matcher (raw FPFH) is used. Throws ErrorCode::no_model on failure.
RegisterOutcome register_pair_files(const std::string& ply_a, const std::string& ply_b,
                                    const std::string& model_path, const SgpConfig& cfg);

/// Recall of a saved model over a ground-truth-bearing manifest.
double evaluate_files(const std::string& model_path, const std::string& manifest_path,
                      const SgpConfig& cfg);

/// Returns the path of the run's metrics.csv; copies it to `out_path` first
/// when nonempty.
std::string export_metrics(const std::string& run_dir, const std::string& out_path);

}  // namespace sgp
