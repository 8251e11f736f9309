#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgp/geometry.hpp"
#include "sgp/gt_audit.hpp"

namespace sgp {

/// Synthetic indoor-ish scene: surface samples from a primitive mix, sensor
/// at the origin, geometry in the +z half-space at 1-5 m range.
struct SceneSpec {
  uint64_t seed = 0;
  int planes = 3;
  int spheres = 2;
  int cylinders = 1;
  int boxes = 2;
  double min_size = 0.5;  // meters; primitive characteristic size range
  double max_size = 1.4;
  int points_per_scene = 2600;       // minimum total surface samples
  double sampling_density = 150.0;   // samples per square meter
};

struct PairSpec {
  double rot_min_deg = 10.0;
  double rot_max_deg = 45.0;
  double trans_min = 0.1;   // meters
  double trans_max = 0.6;
  double target_overlap = 0.95;   // fraction of A retained in B
  double noise_sigma = 0.024;     // meters, Gaussian, applied to cloud B
  double clutter_fraction = 0.0;  // clutter points added to B, as a fraction of its surface points

  void validate() const;
};

/// Difficulty preset used by the acceptance protocol: calibrated so the
/// bootstrap matcher lands in the 60-85% recall band with headroom for the
/// loop to improve. Values fixed by the committed calibration run.
SceneSpec default_scene_spec();
PairSpec default_pair_spec();

PointCloud make_scene(const SceneSpec& spec);

/// Raw generated pair (generation side; the ground truth is not yet behind
/// the audit wrapper).
struct RawPair {
  PointCloud cloud_a;
  PointCloud cloud_b;
  RigidTransform ground_truth;
  double achieved_overlap = 0.0;
  bool overlap_tuned = true;  // false when 100 tuning attempts missed +-5%
};

RawPair make_pair(const PointCloud& scene, const PairSpec& spec, uint64_t seed);

/// A pair as consumed by the pipeline: ground truth is hidden behind the
/// audit hook and flagged evaluation-only.
struct DatasetPair {
  std::string id;
  PointCloud cloud_a;
  PointCloud cloud_b;
  HiddenTransform ground_truth;
  double achieved_overlap = 0.0;
};

struct PairDataset {
  std::vector<DatasetPair> train;
  std::vector<DatasetPair> test;
};

/// Disjoint seeded train/test splits (fresh scene per pair). When
/// `write_dir` is given, also writes clouds/<id>_{a,b}.ply plus train.csv
/// and test.csv manifests into that directory.
PairDataset make_dataset(int n_train, int n_test, const SceneSpec& scene_spec,
                         const PairSpec& pair_spec, uint64_t seed,
                         const std::string* write_dir = nullptr);

}  // namespace sgp
