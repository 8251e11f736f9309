#include "sgp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "sgp/errors.hpp"

namespace sgp {

bool is_valid_rotation(const Mat3& rotation, double tol) {
  if (!rotation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

bool is_valid_transform(const RigidTransform& transform, double tol) {
  return transform.translation.allFinite() && is_valid_rotation(transform.rotation, tol);
}

Mat3 orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

void validate_cloud(const PointCloud& cloud) {
  for (const Vec3& p : cloud.points) {
    if (!p.allFinite()) throw Error(ErrorCode::numeric, "point cloud contains non-finite coordinates");
  }
  if (cloud.has_normals()) {
    if (cloud.normals.size() != cloud.points.size())
      throw Error(ErrorCode::invalid_argument, "normal count does not match point count");
    for (const Vec3& n : cloud.normals) {
      if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6)
        throw Error(ErrorCode::numeric, "normals must be unit length");
    }
  }
  if (cloud.has_descriptors()) {
    if (cloud.descriptors.size() != cloud.points.size())
      throw Error(ErrorCode::invalid_argument, "descriptor count does not match point count");
    const Eigen::Index dim = cloud.descriptors.front().size();
    for (const auto& d : cloud.descriptors) {
      if (d.size() != dim) throw Error(ErrorCode::invalid_argument, "descriptor dimension not uniform");
      if (!d.allFinite()) throw Error(ErrorCode::numeric, "descriptor contains non-finite values");
    }
  }
}

PointCloud apply_transform(const RigidTransform& transform, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(transform.apply(p));
  out.normals.reserve(cloud.normals.size());
  for (const Vec3& n : cloud.normals) out.normals.push_back(transform.rotation * n);
  out.descriptors = cloud.descriptors;
  return out;
}

RigidTransform compose(const RigidTransform& t2, const RigidTransform& t1) {
  RigidTransform out;
  out.rotation = t2.rotation * t1.rotation;
  out.translation = t2.rotation * t1.translation + t2.translation;
  // Long composition chains drift; polar-project back onto SO(3) only then,
  // so single compositions stay bit-reproducible.
  const Mat3 gram = out.rotation.transpose() * out.rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    out.rotation = orthonormalized(out.rotation);
  }
  return out;
}

RigidTransform inverse(const RigidTransform& transform) {
  RigidTransform out;
  out.rotation = transform.rotation.transpose();
  out.translation = -(out.rotation * transform.translation);
  return out;
}

double rotation_error_deg(const Mat3& r1, const Mat3& r2) {
  if (r1 == r2) return 0.0;
  const Mat3 q = r1.transpose() * r2;
  // Geodesic angle, arccos((trace - 1) / 2) clamped to [-1, 1]. Evaluated as
  // atan2 of the sine part (antisymmetric entries) and the cosine part: the
  // plain arccos form has a ~1e-6 degree noise floor near 0, far above the
  // sub-1e-9-degree resolution the exactness checks need.
  const double cos_part = std::clamp((q.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 skew(q(2, 1) - q(1, 2), q(0, 2) - q(2, 0), q(1, 0) - q(0, 1));
  const double sin_part = 0.5 * skew.norm();
  return std::atan2(sin_part, cos_part) * 180.0 / M_PI;
}

double translation_error(const Vec3& t1, const Vec3& t2) { return (t1 - t2).norm(); }

double registration_residual(const RigidTransform& transform, const Vec3& p, const Vec3& q) {
  return (q - transform.rotation * p - transform.translation).norm();
}

double tls_cost(double residual, double c_bar) {
  if (!(c_bar > 0.0)) throw Error(ErrorCode::invalid_argument, "tls_cost: c_bar must be positive");
  const double sq = residual * residual;
  const double cap = c_bar * c_bar;
  return sq < cap ? sq : cap;
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg) {
  const double angle = angle_deg * M_PI / 180.0;
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace sgp
