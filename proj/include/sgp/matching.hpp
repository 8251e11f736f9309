#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sgp {

/// A putative match between point index_a of cloud A and index_b of cloud B,
/// with their descriptor-space L2 distance.
struct Correspondence {
  int index_a = -1;
  int index_b = -1;
  double feature_distance = 0.0;
};

/// One correspondence per descriptor of A: the argmin-distance descriptor in
/// B, ties broken toward the lowest B index. Uses a k-d tree when the
/// dimension is <= 16 and a brute-force scan otherwise (identical results).
std::vector<Correspondence> match_nn(const std::vector<Eigen::VectorXd>& desc_a,
                                     const std::vector<Eigen::VectorXd>& desc_b);

/// Mutual-nearest-neighbor filter: keeps (k, j) from `matches_ab` iff
/// `matches_ba` maps j back to k.
std::vector<Correspondence> cross_check(const std::vector<Correspondence>& matches_ab,
                                        const std::vector<Correspondence>& matches_ba);

/// Lowe-style filter: keeps a nearest-neighbor match iff
/// d(nearest) < zeta * d(second nearest). Requires 0 < zeta < 1 and at least
/// two descriptors in B. The conventional threshold is 0.75; the default 3D
/// pipeline uses cross_check instead and leaves this off.
std::vector<Correspondence> ratio_test(const std::vector<Eigen::VectorXd>& desc_a,
                                       const std::vector<Eigen::VectorXd>& desc_b, double zeta);

}  // namespace sgp
