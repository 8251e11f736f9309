// Independent reference implementations used as test oracles. Everything
// here is written directly from the defining formulas and must stay
// independent of the library code paths it checks.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgp/geometry.hpp"
#include "sgp/matching.hpp"
#include "sgp/mlp.hpp"
#include "sgp/rng.hpp"

namespace oracle {

/// Composition via 4x4 homogeneous matrix product.
sgp::RigidTransform compose_homogeneous(const sgp::RigidTransform& t2, const sgp::RigidTransform& t1);

/// Voxel grid downsample: group by floor(p / voxel), average per cell,
/// first-occurrence cell order.
std::vector<sgp::Vec3> voxel_downsample_grid(const std::vector<sgp::Vec3>& points, double voxel);

/// O(n*m) nearest-neighbor matching, ties to the lowest index.
std::vector<sgp::Correspondence> match_brute_force(const std::vector<Eigen::VectorXd>& desc_a,
                                                   const std::vector<Eigen::VectorXd>& desc_b);

/// Naive double-loop FPFH over the same SPFH formulas (11 bins per angle,
/// SPFH(p) + (1/k) sum SPFH(q)/dist, blocks normalized to 100).
std::vector<Eigen::VectorXd> fpfh_naive(const sgp::PointCloud& cloud, double radius);

/// O(n*m) overlap fraction: share of A points with a transformed neighbor
/// in B within tau.
double overlap_brute_force(const sgp::RigidTransform& transform, const sgp::PointCloud& cloud_a,
                           const sgp::PointCloud& cloud_b, double tau);

/// Brute-force positive set of the correspondence-generation rule: for each
/// A index, the nearest B point to the transformed position when closer
/// than c_bar. Pairs (a_index, b_index).
std::vector<std::pair<int, int>> training_positives_brute_force(const sgp::PointCloud& cloud_a,
                                                                const sgp::PointCloud& cloud_b,
                                                                const sgp::RigidTransform& label,
                                                                double c_bar);

/// Central finite differences of the batch loss with respect to every
/// parameter, h = 1e-5.
sgp::MlpGradient finite_difference_gradient(const sgp::MlpDescriptor& model,
                                            const sgp::TrainingBatch& batch,
                                            const sgp::LossConfig& cfg, double h = 1e-5);

/// The loss is nondifferentiable at ReLU kinks and at coincident embeddings;
/// finite differences are only a valid reference away from them. True when
/// every hidden pre-activation and every participating embedding distance
/// clears the probe step by a wide margin.
bool fd_reference_valid(const sgp::MlpDescriptor& model, const sgp::TrainingBatch& batch);

// --- random instance helpers (deterministic via sgp::Rng) ---

sgp::Vec3 random_unit(sgp::Rng& rng);
sgp::RigidTransform random_transform(sgp::Rng& rng, double max_angle_deg = 180.0,
                                     double max_translation = 2.0);
std::vector<sgp::Vec3> random_points(sgp::Rng& rng, int count, double half_extent = 1.0);
Eigen::VectorXd random_vector(sgp::Rng& rng, int dim, double half_extent = 1.0);

}  // namespace oracle
