#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "sgp/geometry.hpp"

namespace sgp {

/// k-d tree over fixed-dimension real vectors. All queries resolve exact
///-distance ties toward the lowest point index, so results are identical to
/// a brute-force scan with the same tie rule regardless of tree layout.
class KdTree {
 public:
  struct Hit {
    int index = -1;
    double sq_dist = 0.0;
  };

  KdTree() = default;

  /// Copies `count` rows of `dim` doubles.
  void build(const double* data, std::size_t count, std::size_t dim);

  static KdTree from_points(const std::vector<Vec3>& points);
  static KdTree from_descriptors(const std::vector<Eigen::VectorXd>& descriptors);

  std::size_t size() const { return count_; }
  std::size_t dimension() const { return dim_; }
  bool empty() const { return count_ == 0; }

  /// Nearest neighbor. Tree must be nonempty.
  Hit nearest(const double* query) const;
  Hit nearest(const Vec3& query) const { return nearest(query.data()); }

  /// Two nearest neighbors with distinct indices. second.index = -1 when the
  /// tree holds fewer than two points.
  std::pair<Hit, Hit> two_nearest(const double* query) const;

  /// k nearest, sorted by (distance, index). Returns fewer when size() < k.
  void knn(const double* query, int k, std::vector<Hit>& out) const;
  void knn(const Vec3& query, int k, std::vector<Hit>& out) const {
    knn(query.data(), k, out);
  }

  /// Indices of all points with distance <= radius, ascending by index.
  void radius_indices(const double* query, double radius, std::vector<int>& out) const;
  void radius_indices(const Vec3& query, double radius, std::vector<int>& out) const {
    radius_indices(query.data(), radius, out);
  }

 private:
  struct Node {
    int left = -1;
    int right = -1;
    int begin = 0;
    int end = 0;          // leaf covers order_[begin, end)
    int split_dim = -1;   // -1 for leaves
    double split_val = 0.0;
  };

  int build_recursive(int begin, int end);
  const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * dim_; }
  double sq_dist(const double* a, const double* b) const;

  template <typename Visit>
  void search(int node, const double* query, Visit&& visit, double& bound) const;

  std::vector<double> data_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  int root_ = -1;
};

}  // namespace sgp
