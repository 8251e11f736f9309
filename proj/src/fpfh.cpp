#include "sgp/fpfh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "sgp/errors.hpp"
#include "sgp/kdtree.hpp"

namespace sgp {

namespace {

struct VoxelKey {
  int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    uint64_t h = 1469598103934665603ULL;
    for (int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw Error(ErrorCode::invalid_argument, "voxel_downsample: voxel must be positive");
  std::unordered_map<VoxelKey, int, VoxelKeyHash> cell_of;
  std::vector<Vec3> sums;
  std::vector<int> counts;
  cell_of.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    const VoxelKey key{static_cast<int64_t>(std::floor(p.x() / voxel)),
                       static_cast<int64_t>(std::floor(p.y() / voxel)),
                       static_cast<int64_t>(std::floor(p.z() / voxel))};
    auto [it, inserted] = cell_of.try_emplace(key, static_cast<int>(sums.size()));
    if (inserted) {
      sums.push_back(p);
      counts.push_back(1);
    } else {
      sums[it->second] += p;
      ++counts[it->second];
    }
  }
  PointCloud out;
  out.points.reserve(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) out.points.push_back(sums[i] / counts[i]);
  return out;
}

PointCloud estimate_normals(const PointCloud& cloud, int k, std::vector<int>* degenerate_out) {
  if (k < 3) throw Error(ErrorCode::invalid_argument, "estimate_normals: k must be >= 3");
  if (cloud.size() < static_cast<std::size_t>(k))
    throw Error(ErrorCode::invalid_argument, "estimate_normals: cloud smaller than k");
  if (degenerate_out) degenerate_out->clear();

  const KdTree tree = KdTree::from_points(cloud.points);
  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Vec3::UnitZ());

  std::vector<KdTree::Hit> hits;
  std::vector<int> neighbor_ids;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    tree.knn(cloud.points[i], k, hits);
    neighbor_ids.clear();
    for (const auto& h : hits) neighbor_ids.push_back(h.index);
    std::sort(neighbor_ids.begin(), neighbor_ids.end());  // index order: deterministic sums

    Vec3 mean = Vec3::Zero();
    for (int id : neighbor_ids) mean += cloud.points[id];
    mean /= static_cast<double>(neighbor_ids.size());
    Mat3 cov = Mat3::Zero();
    for (int id : neighbor_ids) {
      const Vec3 d = cloud.points[id] - mean;
      cov += d * d.transpose();
    }

    if (cov.cwiseAbs().maxCoeff() < 1e-18) {
      if (degenerate_out) degenerate_out->push_back(static_cast<int>(i));
      continue;  // keeps the (0,0,1) fallback
    }

    Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
    Vec3 normal = solver.eigenvectors().col(0).normalized();

    // Orient toward the origin viewpoint; perpendicular ties break toward +z
    // (then +y, +x, for the measure-zero leftovers).
    const double toward = normal.dot(-cloud.points[i]);
    if (toward < 0.0) {
      normal = -normal;
    } else if (toward == 0.0) {
      if (normal.z() < 0.0 || (normal.z() == 0.0 && (normal.y() < 0.0 || (normal.y() == 0.0 && normal.x() < 0.0)))) {
        normal = -normal;
      }
    }
    out.normals[i] = normal;
  }
  return out;
}

namespace detail {

bool pair_angles(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2,
                 double& alpha, double& phi, double& theta) {
  Vec3 delta = p2 - p1;
  const double dist = delta.norm();
  if (dist == 0.0) return false;
  delta /= dist;

  // The source is the endpoint whose normal subtends the smaller angle with
  // the connecting line; this makes the triplet symmetric in the pair.
  const double a1 = n1.dot(delta);
  const double a2 = n2.dot(delta);
  Vec3 ns = n1;
  Vec3 nt = n2;
  if (std::acos(std::abs(a1)) > std::acos(std::abs(a2))) {
    ns = n2;
    nt = n1;
    delta = -delta;
    phi = -a2;
  } else {
    phi = a1;
  }

  Vec3 v = delta.cross(ns);
  const double v_norm = v.norm();
  if (v_norm == 0.0) return false;
  v /= v_norm;
  const Vec3 w = ns.cross(v);
  alpha = v.dot(nt);
  theta = std::atan2(w.dot(nt), ns.dot(nt));
  return true;
}

int angle_bin(double value, double lo, double hi) {
  const int bin = static_cast<int>(std::floor(kFpfhBinsPerAngle * (value - lo) / (hi - lo)));
  return std::clamp(bin, 0, kFpfhBinsPerAngle - 1);
}

}  // namespace detail

namespace {

using Histogram = Eigen::Matrix<double, kFpfhDim, 1>;

Histogram spfh_histogram(const PointCloud& cloud, int i, const std::vector<int>& neighbors) {
  Histogram hist = Histogram::Zero();
  for (int j : neighbors) {
    double alpha, phi, theta;
    if (!detail::pair_angles(cloud.points[i], cloud.normals[i], cloud.points[j], cloud.normals[j],
                             alpha, phi, theta)) {
      continue;
    }
    hist[detail::angle_bin(alpha, -1.0, 1.0)] += 1.0;
    hist[kFpfhBinsPerAngle + detail::angle_bin(phi, -1.0, 1.0)] += 1.0;
    hist[2 * kFpfhBinsPerAngle + detail::angle_bin(theta, -M_PI, M_PI)] += 1.0;
  }
  return hist;
}

void normalize_blocks(Histogram& hist) {
  for (int block = 0; block < 3; ++block) {
    auto segment = hist.segment(block * kFpfhBinsPerAngle, kFpfhBinsPerAngle);
    const double sum = segment.sum();
    if (sum > 0.0) segment *= 100.0 / sum;
  }
}

}  // namespace

std::vector<Eigen::VectorXd> compute_fpfh(const PointCloud& cloud, double radius) {
  if (!cloud.has_normals()) throw Error(ErrorCode::invalid_argument, "compute_fpfh: normals required");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "compute_fpfh: radius must be positive");

  const std::size_t n = cloud.size();
  const KdTree tree = KdTree::from_points(cloud.points);

  std::vector<std::vector<int>> neighborhoods(n);
  std::vector<int> found;
  for (std::size_t i = 0; i < n; ++i) {
    tree.radius_indices(cloud.points[i], radius, found);
    auto& dst = neighborhoods[i];
    dst.reserve(found.size());
    for (int id : found) {
      if (id != static_cast<int>(i)) dst.push_back(id);
    }
  }

  std::vector<Histogram> spfh(n);
  for (std::size_t i = 0; i < n; ++i) spfh[i] = spfh_histogram(cloud, static_cast<int>(i), neighborhoods[i]);

  // FPFH(p) = SPFH(p) + (1/k) * sum over neighbors q of SPFH(q) / ||p - q||.
  std::vector<Eigen::VectorXd> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Histogram fused = Histogram::Zero();
    const auto& neighbors = neighborhoods[i];
    if (!neighbors.empty()) {
      fused = spfh[i];
      Histogram weighted = Histogram::Zero();
      for (int j : neighbors) {
        const double dist = (cloud.points[i] - cloud.points[j]).norm();
        if (dist > 0.0) weighted += spfh[j] / dist;
      }
      fused += weighted / static_cast<double>(neighbors.size());
      normalize_blocks(fused);
    }
    out[i] = fused;
  }
  return out;
}

std::vector<int> nonzero_descriptor_indices(const std::vector<Eigen::VectorXd>& descriptors) {
  std::vector<int> out;
  out.reserve(descriptors.size());
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    if (descriptors[i].size() > 0 && descriptors[i].cwiseAbs().maxCoeff() > 0.0) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace sgp
