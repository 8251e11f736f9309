#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sgp/errors.hpp"
#include "sgp/kdtree.hpp"
#include "sgp/verifier.hpp"

using namespace sgp;

namespace {

std::vector<PseudoLabel> labels_with_overlaps(const std::vector<double>& overlaps) {
  std::vector<PseudoLabel> labels;
  for (std::size_t i = 0; i < overlaps.size(); ++i) {
    PseudoLabel label;
    label.pair_id = "p" + std::to_string(i);
    label.overlap_ratio = overlaps[i];
    label.has_model = true;
    labels.push_back(label);
  }
  return labels;
}

}  // namespace

TEST_CASE("overlap_ratio: perfect overlap and disjoint clouds") {
  Rng rng(701);
  const RigidTransform t = oracle::random_transform(rng, 40.0, 0.4);
  PointCloud cloud_a;
  cloud_a.points = oracle::random_points(rng, 200);
  const PointCloud cloud_b = apply_transform(t, cloud_a);
  const KdTree tree_b = KdTree::from_points(cloud_b.points);
  CHECK(overlap_ratio(t, cloud_a, cloud_b, tree_b, 0.07) == 1.0);

  // Separate the clouds by far more than 10 tau.
  PointCloud far_b = cloud_b;
  for (auto& p : far_b.points) p += Vec3(50, 0, 0);
  const KdTree far_tree = KdTree::from_points(far_b.points);
  CHECK(overlap_ratio(t, cloud_a, far_b, far_tree, 0.07) == 0.0);
}

TEST_CASE("overlap_ratio: constructed 40-of-100 case matches brute force") {
  Rng rng(709);
  PointCloud cloud_a;
  cloud_a.points = oracle::random_points(rng, 100);
  PointCloud cloud_b;
  const double tau = 0.05;
  for (int i = 0; i < 100; ++i) {
    if (i < 40) {
      cloud_b.points.push_back(cloud_a.points[i] + oracle::random_unit(rng) * rng.uniform(0.0, 0.8 * tau));
    } else {
      cloud_b.points.push_back(cloud_a.points[i] + Vec3(5.0 + i, 0, 0));
    }
  }
  const KdTree tree_b = KdTree::from_points(cloud_b.points);
  const double lib = overlap_ratio(RigidTransform::identity(), cloud_a, cloud_b, tree_b, tau);
  CHECK(lib == doctest::Approx(0.40));
  CHECK(lib == oracle::overlap_brute_force(RigidTransform::identity(), cloud_a, cloud_b, tau));
}

TEST_CASE("overlap_ratio matches brute force on random instances") {
  Rng rng(719);
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform t = oracle::random_transform(rng, 30.0, 0.3);
    PointCloud cloud_a, cloud_b;
    cloud_a.points = oracle::random_points(rng, 150);
    cloud_b.points = oracle::random_points(rng, 120);
    const KdTree tree_b = KdTree::from_points(cloud_b.points);
    const double tau = rng.uniform(0.1, 0.6);
    CHECK(overlap_ratio(t, cloud_a, cloud_b, tree_b, tau) ==
          oracle::overlap_brute_force(t, cloud_a, cloud_b, tau));
  }
}

TEST_CASE("overlap_ratio is invariant under a common rigid motion") {
  Rng rng(727);
  const RigidTransform t = oracle::random_transform(rng, 30.0, 0.3);
  PointCloud cloud_a, cloud_b;
  cloud_a.points = oracle::random_points(rng, 100);
  cloud_b.points = oracle::random_points(rng, 100);
  const KdTree tree_b = KdTree::from_points(cloud_b.points);
  const double base = overlap_ratio(t, cloud_a, cloud_b, tree_b, 0.2);

  const RigidTransform motion = oracle::random_transform(rng, 60.0, 1.0);
  const PointCloud moved_b = apply_transform(motion, cloud_b);
  const KdTree moved_tree = KdTree::from_points(moved_b.points);
  const double moved = overlap_ratio(compose(motion, t), cloud_a, moved_b, moved_tree, 0.2);
  CHECK(base == moved);
}

TEST_CASE("verify_labels thresholds inclusively and updates flags") {
  auto labels = labels_with_overlaps({0.05, 0.3, 0.31});
  const auto survivors = verify_labels(labels, 0.30);
  CHECK(survivors == std::vector<int>{1, 2});
  CHECK_FALSE(labels[0].verified);
  CHECK(labels[1].verified);
  CHECK(labels[2].verified);

  // eta = 0 keeps everything; eta = 1 with all ratios < 1 keeps nothing.
  auto all = labels_with_overlaps({0.0, 0.5, 0.99});
  CHECK(verify_labels(all, 0.0).size() == 3);
  CHECK(verify_labels(all, 1.0).empty());

  CHECK_THROWS_AS(verify_labels(all, -0.1), Error);
  CHECK_THROWS_AS(verify_labels(all, 1.1), Error);
}

TEST_CASE("verify_labels is monotone in eta and excludes no-model labels") {
  Rng rng(733);
  std::vector<double> overlaps;
  for (int i = 0; i < 50; ++i) overlaps.push_back(rng.uniform(0.0, 1.0));
  auto labels = labels_with_overlaps(overlaps);
  labels[7].has_model = false;

  std::vector<int> previous;
  for (double eta = 0.0; eta <= 1.0; eta += 0.1) {
    const auto survivors = verify_labels(labels, eta);
    if (eta > 0.0) {
      for (int idx : survivors) {
        CHECK(std::find(previous.begin(), previous.end(), idx) != previous.end());
      }
    }
    for (int idx : survivors) CHECK(idx != 7);
    previous = survivors;
  }
}

TEST_CASE("plsr arithmetic") {
  CHECK(plsr(100, 100) == 100.0);
  CHECK(plsr(0, 10) == 0.0);
  CHECK(plsr(69, 100) == doctest::Approx(69.0));
  CHECK_THROWS_AS(plsr(1, 0), Error);
  CHECK_THROWS_AS(plsr(5, 4), Error);
}

TEST_CASE("label_correct boundary semantics") {
  const SuccessTolerance tols{15.0, 0.30};
  Rng rng(739);
  const RigidTransform gt = oracle::random_transform(rng);
  CHECK(label_correct(gt, gt, tols));

  RigidTransform off20 = gt;
  off20.rotation = axis_angle_rotation(Vec3(0, 0, 1), 20.0) * gt.rotation;
  CHECK_FALSE(label_correct(off20, gt, tols));

  RigidTransform near_boundary = gt;
  near_boundary.rotation = axis_angle_rotation(Vec3(1, 0, 0), 14.0) * gt.rotation;
  near_boundary.translation = gt.translation + Vec3(0.29, 0, 0);
  CHECK(label_correct(near_boundary, gt, tols));

  RigidTransform at_translation_boundary = gt;
  at_translation_boundary.translation = gt.translation + Vec3(0.30, 0, 0);
  CHECK_FALSE(label_correct(at_translation_boundary, gt, tols));  // strict inequality
}

TEST_CASE("plir over the verified set only") {
  Rng rng(743);
  const SuccessTolerance tols;
  std::vector<PseudoLabel> labels;
  std::vector<RigidTransform> gts;
  for (int i = 0; i < 10; ++i) {
    const RigidTransform gt = oracle::random_transform(rng, 40.0, 0.5);
    gts.push_back(gt);
    PseudoLabel label;
    label.pair_id = "p" + std::to_string(i);
    label.has_model = true;
    label.transform = gt;
    if (i == 4) {  // one wrong label
      label.transform.rotation = axis_angle_rotation(Vec3(0, 1, 0), 60.0) * gt.rotation;
    }
    labels.push_back(label);
  }
  std::vector<int> all(10);
  for (int i = 0; i < 10; ++i) all[i] = i;
  CHECK(plir(all, labels, gts, tols) == doctest::Approx(90.0));

  const std::vector<int> only_correct{0, 1, 2, 3};
  CHECK(plir(only_correct, labels, gts, tols) == 100.0);
  CHECK_THROWS_AS(plir({}, labels, gts, tols), Error);
}

TEST_CASE("recall over all pairs") {
  Rng rng(751);
  const SuccessTolerance tols;
  std::vector<RigidTransform> estimates, gts;
  for (int i = 0; i < 8; ++i) {
    // Clearly outside the 15 degree / 30 cm success region of the identity.
    RigidTransform gt;
    gt.rotation = axis_angle_rotation(oracle::random_unit(rng), rng.uniform(25.0, 40.0));
    gt.translation = oracle::random_unit(rng) * rng.uniform(0.35, 0.5);
    gts.push_back(gt);
    estimates.push_back(i % 2 == 0 ? gt : RigidTransform::identity());
  }
  CHECK(recall(estimates, gts, tols) == doctest::Approx(50.0));
  CHECK(recall(gts, gts, tols) == 100.0);

  std::vector<RigidTransform> identities(8);
  CHECK(recall(identities, gts, tols) == 0.0);
}

TEST_CASE("metrics csv round trip with empty optional cells") {
  std::vector<LoopMetrics> rows;
  LoopMetrics r1;
  r1.iteration = 1;
  r1.plsr = 69.5;
  r1.plir = 92.25;
  r1.train_recall = 88.0;
  rows.push_back(r1);
  LoopMetrics r2;
  r2.iteration = 2;
  r2.plsr = 100.0;
  r2.test_recall = 90.5;
  rows.push_back(r2);

  const std::string text = metrics_to_csv(rows);
  CHECK(text.find("iteration,plsr,plir,train_recall,test_recall\n") == 0);
  const auto parsed = metrics_from_csv(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].iteration == 1);
  CHECK(parsed[0].plsr == 69.5);
  CHECK(parsed[0].plir == 92.25);
  CHECK(parsed[0].train_recall == 88.0);
  CHECK_FALSE(parsed[0].test_recall.has_value());
  CHECK_FALSE(parsed[1].plir.has_value());
  CHECK(parsed[1].test_recall == 90.5);
}
