#include "sgp/matching.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "sgp/errors.hpp"
#include "sgp/kdtree.hpp"

namespace sgp {

namespace {

void check_inputs(const std::vector<Eigen::VectorXd>& desc_a,
                  const std::vector<Eigen::VectorXd>& desc_b) {
  if (desc_a.empty() || desc_b.empty())
    throw Error(ErrorCode::invalid_argument, "matching: descriptor lists must be nonempty");
  const Eigen::Index dim = desc_a.front().size();
  for (const auto& d : desc_a)
    if (d.size() != dim) throw Error(ErrorCode::invalid_argument, "matching: dimension mismatch in A");
  for (const auto& d : desc_b)
    if (d.size() != dim) throw Error(ErrorCode::invalid_argument, "matching: dimension mismatch between A and B");
}

// Trees stop paying off past low dimensions; 16 is the learned-embedding
// size, 33 (FPFH) goes through the scan.
constexpr Eigen::Index kTreeDimLimit = 16;

}  // namespace

std::vector<Correspondence> match_nn(const std::vector<Eigen::VectorXd>& desc_a,
                                     const std::vector<Eigen::VectorXd>& desc_b) {
  check_inputs(desc_a, desc_b);
  std::vector<Correspondence> out;
  out.reserve(desc_a.size());

  if (desc_a.front().size() <= kTreeDimLimit) {
    const KdTree tree = KdTree::from_descriptors(desc_b);
    for (std::size_t k = 0; k < desc_a.size(); ++k) {
      const KdTree::Hit hit = tree.nearest(desc_a[k].data());
      out.push_back({static_cast<int>(k), hit.index, std::sqrt(hit.sq_dist)});
    }
    return out;
  }

  for (std::size_t k = 0; k < desc_a.size(); ++k) {
    int best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < desc_b.size(); ++j) {
      const double sq = (desc_a[k] - desc_b[j]).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best = static_cast<int>(j);
      }
    }
    out.push_back({static_cast<int>(k), best, std::sqrt(best_sq)});
  }
  return out;
}

std::vector<Correspondence> cross_check(const std::vector<Correspondence>& matches_ab,
                                        const std::vector<Correspondence>& matches_ba) {
  std::unordered_map<int, int> back_map;
  back_map.reserve(matches_ba.size());
  for (const Correspondence& back : matches_ba) back_map.emplace(back.index_a, back.index_b);

  std::vector<Correspondence> out;
  out.reserve(matches_ab.size());
  for (const Correspondence& m : matches_ab) {
    const auto it = back_map.find(m.index_b);
    if (it != back_map.end() && it->second == m.index_a) out.push_back(m);
  }
  return out;
}

std::vector<Correspondence> ratio_test(const std::vector<Eigen::VectorXd>& desc_a,
                                       const std::vector<Eigen::VectorXd>& desc_b, double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw Error(ErrorCode::invalid_argument, "ratio_test: zeta must lie in (0, 1)");
  check_inputs(desc_a, desc_b);
  if (desc_b.size() < 2)
    throw Error(ErrorCode::invalid_argument, "ratio_test: need at least two descriptors in B");

  std::vector<Correspondence> out;
  const bool use_tree = desc_a.front().size() <= kTreeDimLimit;
  const KdTree tree = use_tree ? KdTree::from_descriptors(desc_b) : KdTree();

  for (std::size_t k = 0; k < desc_a.size(); ++k) {
    double d1_sq = std::numeric_limits<double>::infinity();
    double d2_sq = std::numeric_limits<double>::infinity();
    int best = 0;
    if (use_tree) {
      const auto [first, second] = tree.two_nearest(desc_a[k].data());
      best = first.index;
      d1_sq = first.sq_dist;
      d2_sq = second.sq_dist;
    } else {
      for (std::size_t j = 0; j < desc_b.size(); ++j) {
        const double sq = (desc_a[k] - desc_b[j]).squaredNorm();
        if (sq < d1_sq) {
          d2_sq = d1_sq;
          d1_sq = sq;
          best = static_cast<int>(j);
        } else if (sq < d2_sq) {
          d2_sq = sq;
        }
      }
    }
    const double d1 = std::sqrt(d1_sq);
    const double d2 = std::sqrt(d2_sq);
    if (d1 < zeta * d2) out.push_back({static_cast<int>(k), best, d1});
  }
  return out;
}

}  // namespace sgp
