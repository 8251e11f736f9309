#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgp/geometry.hpp"

namespace sgp {

inline constexpr int kFpfhBinsPerAngle = 11;
inline constexpr int kFpfhDim = 3 * kFpfhBinsPerAngle;

/// Dense uniform detector: one point per occupied voxel, at the centroid of
/// that voxel's members. Output keeps first-occurrence voxel order; normals
/// and descriptors are dropped (they are recomputed downstream).
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

/// Per-point normal from the k-nearest-neighbor covariance (smallest
/// eigenvector), oriented so normal . (viewpoint - p) >= 0 with the viewpoint
/// at the origin; exact perpendicularity breaks toward +z. Degenerate
/// neighborhoods (zero covariance) get (0,0,1) and are reported in
/// `degenerate_out` when provided.
PointCloud estimate_normals(const PointCloud& cloud, int k,
                            std::vector<int>* degenerate_out = nullptr);

/// 33-dimensional FPFH descriptors: three 11-bin histograms over the
/// (alpha, phi, theta) Darboux-frame angles, weighted over the radius
/// neighborhood, each 11-bin block normalized to sum 100. Points with no
/// neighbor within `radius` get the all-zero descriptor.
std::vector<Eigen::VectorXd> compute_fpfh(const PointCloud& cloud, double radius);

/// Indices of points whose descriptor is not all-zero (eligible for
/// matching).
std::vector<int> nonzero_descriptor_indices(const std::vector<Eigen::VectorXd>& descriptors);

namespace detail {
/// Angle triplet for one ordered point pair, after source/target selection.
/// Returns false (and leaves outputs untouched) for coincident points or a
/// normal parallel to the connecting line.
bool pair_angles(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2,
                 double& alpha, double& phi, double& theta);

int angle_bin(double value, double lo, double hi);
}  // namespace detail

}  // namespace sgp
