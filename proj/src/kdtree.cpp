#include "sgp/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgp/errors.hpp"

namespace sgp {

namespace {
constexpr int kLeafSize = 8;

bool better(double d2, int idx, double best_d2, int best_idx) {
  return d2 < best_d2 || (d2 == best_d2 && idx < best_idx);
}
}  // namespace

void KdTree::build(const double* data, std::size_t count, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::invalid_argument, "KdTree: dimension must be positive");
  data_.assign(data, data + count * dim);
  count_ = count;
  dim_ = dim;
  order_.resize(count);
  for (std::size_t i = 0; i < count; ++i) order_[i] = static_cast<int>(i);
  nodes_.clear();
  nodes_.reserve(count / kLeafSize * 2 + 4);
  root_ = count == 0 ? -1 : build_recursive(0, static_cast<int>(count));
}

KdTree KdTree::from_points(const std::vector<Vec3>& points) {
  KdTree tree;
  std::vector<double> flat;
  flat.reserve(points.size() * 3);
  for (const Vec3& p : points) {
    flat.push_back(p.x());
    flat.push_back(p.y());
    flat.push_back(p.z());
  }
  tree.build(flat.data(), points.size(), 3);
  return tree;
}

KdTree KdTree::from_descriptors(const std::vector<Eigen::VectorXd>& descriptors) {
  KdTree tree;
  if (descriptors.empty()) {
    tree.build(nullptr, 0, 1);
    return tree;
  }
  const std::size_t dim = static_cast<std::size_t>(descriptors.front().size());
  std::vector<double> flat;
  flat.reserve(descriptors.size() * dim);
  for (const auto& d : descriptors) flat.insert(flat.end(), d.data(), d.data() + dim);
  tree.build(flat.data(), descriptors.size(), dim);
  return tree;
}

int KdTree::build_recursive(int begin, int end) {
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[node_index].begin = begin;
  nodes_[node_index].end = end;
  if (end - begin <= kLeafSize) return node_index;

  // Split along the widest extent; median element goes to the right half.
  int split_dim = 0;
  double widest = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = begin; i < end; ++i) {
      const double v = row(order_[i])[d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      split_dim = static_cast<int>(d);
    }
  }
  if (widest <= 0.0) return node_index;  // all points identical: keep as leaf

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double va = row(a)[split_dim];
                     const double vb = row(b)[split_dim];
                     return va < vb || (va == vb && a < b);
                   });
  const double split_val = row(order_[mid])[split_dim];

  Node node;
  node.begin = begin;
  node.end = end;
  node.split_dim = split_dim;
  node.split_val = split_val;
  node.left = build_recursive(begin, mid);
  node.right = build_recursive(mid, end);
  nodes_[node_index] = node;
  return node_index;
}

double KdTree::sq_dist(const double* a, const double* b) const {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return acc;
}

// Generic traversal: `visit(idx, d2)` sees every point whose subtree cannot
// be pruned against `bound`; it may shrink `bound`. Pruning keeps subtrees
// whose boundary distance equals the bound so exact ties are always visited.
template <typename Visit>
void KdTree::search(int node_index, const double* query, Visit&& visit, double& bound) const {
  const Node& node = nodes_[node_index];
  if (node.split_dim < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      visit(idx, sq_dist(query, row(idx)));
    }
    return;
  }
  const double diff = query[node.split_dim] - node.split_val;
  const int near_child = diff < 0.0 ? node.left : node.right;
  const int far_child = diff < 0.0 ? node.right : node.left;
  search(near_child, query, visit, bound);
  if (diff * diff <= bound) search(far_child, query, visit, bound);
}

KdTree::Hit KdTree::nearest(const double* query) const {
  if (empty()) throw Error(ErrorCode::invalid_argument, "KdTree::nearest on empty tree");
  Hit best{-1, std::numeric_limits<double>::infinity()};
  double bound = std::numeric_limits<double>::infinity();
  search(root_, query,
         [&](int idx, double d2) {
           if (better(d2, idx, best.sq_dist, best.index)) {
             best = {idx, d2};
             bound = d2;
           }
         },
         bound);
  return best;
}

std::pair<KdTree::Hit, KdTree::Hit> KdTree::two_nearest(const double* query) const {
  if (empty()) throw Error(ErrorCode::invalid_argument, "KdTree::two_nearest on empty tree");
  Hit first{-1, std::numeric_limits<double>::infinity()};
  Hit second{-1, std::numeric_limits<double>::infinity()};
  double bound = std::numeric_limits<double>::infinity();
  search(root_, query,
         [&](int idx, double d2) {
           if (better(d2, idx, first.sq_dist, first.index)) {
             second = first;
             first = {idx, d2};
           } else if (better(d2, idx, second.sq_dist, second.index)) {
             second = {idx, d2};
           }
           bound = second.sq_dist;
         },
         bound);
  return {first, second};
}

void KdTree::knn(const double* query, int k, std::vector<Hit>& out) const {
  out.clear();
  if (k <= 0 || empty()) return;
  double bound = std::numeric_limits<double>::infinity();
  search(root_, query,
         [&](int idx, double d2) {
           if (out.size() == static_cast<std::size_t>(k) &&
               !better(d2, idx, out.back().sq_dist, out.back().index)) {
             return;
           }
           auto pos = std::lower_bound(out.begin(), out.end(), Hit{idx, d2},
                                       [](const Hit& a, const Hit& b) {
                                         return better(a.sq_dist, a.index, b.sq_dist, b.index);
                                       });
           out.insert(pos, Hit{idx, d2});
           if (out.size() > static_cast<std::size_t>(k)) out.pop_back();
           if (out.size() == static_cast<std::size_t>(k)) bound = out.back().sq_dist;
         },
         bound);
}

void KdTree::radius_indices(const double* query, double radius, std::vector<int>& out) const {
  out.clear();
  if (empty()) return;
  double bound = radius * radius;
  search(root_, query,
         [&](int idx, double d2) {
           if (d2 <= radius * radius) out.push_back(idx);
         },
         bound);
  std::sort(out.begin(), out.end());
}

}  // namespace sgp
