#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace sgp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid motion in SO(3) x R^3. Rotation is stored as a matrix: the Horn
/// solver outputs one directly and matrix form avoids quaternion sign
/// ambiguity in tests.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Checks R^T R = I and det(R) = +1 within `tol`, and all entries finite.
bool is_valid_rotation(const Mat3& rotation, double tol = 1e-9);
bool is_valid_transform(const RigidTransform& transform, double tol = 1e-9);

/// Nearest proper rotation to `m` (polar decomposition via SVD).
Mat3 orthonormalized(const Mat3& m);

/// Point set with optional unit normals and optional per-point descriptors.
/// Parallel arrays: when present, normals/descriptors match points in count.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;                  // empty or size() entries
  std::vector<Eigen::VectorXd> descriptors;   // empty or size() entries

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_descriptors() const { return !descriptors.empty(); }
};

/// Throws sgp::Error if the cloud violates its invariants (finite
/// coordinates, unit normals, uniform descriptor dimension).
void validate_cloud(const PointCloud& cloud);

/// p' = R p + t for every point; normals rotated; descriptors carried.
PointCloud apply_transform(const RigidTransform& transform, const PointCloud& cloud);

/// Result applies t1 first, then t2. Re-orthonormalizes if accumulated
/// floating-point drift pushes the rotation past the validity tolerance.
RigidTransform compose(const RigidTransform& t2, const RigidTransform& t1);

RigidTransform inverse(const RigidTransform& transform);

/// Geodesic distance between rotations, in degrees, in [0, 180].
double rotation_error_deg(const Mat3& r1, const Mat3& r2);

double translation_error(const Vec3& t1, const Vec3& t2);

/// || q - R p - t ||
double registration_residual(const RigidTransform& transform, const Vec3& p, const Vec3& q);

/// Truncated least squares: min(r^2, c_bar^2). Throws on c_bar <= 0.
double tls_cost(double residual, double c_bar);

/// Rotation about `axis` (need not be unit) by `angle_deg` degrees.
Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg);

}  // namespace sgp
