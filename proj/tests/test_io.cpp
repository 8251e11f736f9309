#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "sgp/config.hpp"
#include "sgp/errors.hpp"
#include "sgp/manifest.hpp"
#include "sgp/pipeline.hpp"
#include "sgp/ply_io.hpp"

using namespace sgp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sgp_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal one-point PLY reads back") {
  std::istringstream in(
      "ply\n"
      "format ascii 1.0\n"
      "comment test\n"
      "element vertex 1\n"
      "property float x\n"
      "property float y\n"
      "property float z\n"
      "end_header\n"
      "0.5 -1.25 3\n");
  const PointCloud cloud = read_ply_stream(in, "mini");
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0] == Vec3(0.5, -1.25, 3.0));
  CHECK_FALSE(cloud.has_normals());
}

TEST_CASE("PLY write-read round trip is exact, with and without normals") {
  TempDir dir;
  Rng rng(801);
  PointCloud cloud;
  cloud.points = oracle::random_points(rng, 200, 3.0);
  for (auto& p : cloud.points) p *= 1.0 / 3.0;  // awkward decimals
  const std::string path = (dir.path / "round.ply").string();
  write_ply(cloud, path);
  const PointCloud loaded = read_ply(path);
  REQUIRE(loaded.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(loaded.points[i] == cloud.points[i]);
  }

  cloud.normals.clear();
  for (std::size_t i = 0; i < cloud.size(); ++i) cloud.normals.push_back(oracle::random_unit(rng));
  write_ply(cloud, path);
  const PointCloud with_normals = read_ply(path);
  REQUIRE(with_normals.has_normals());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(with_normals.normals[i] == cloud.normals[i]);
  }

  // Re-write and compare bytes: the closed round trip has a fixed point.
  const std::string path2 = (dir.path / "round2.ply").string();
  write_ply(with_normals, path2);
  std::ifstream f1(path), f2(path2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
}

TEST_CASE("PLY parse errors carry line numbers") {
  auto expect_error = [](const std::string& content, const std::string& needle) {
    std::istringstream in(content);
    try {
      read_ply_stream(in, "bad");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_error("noply\n", "magic");
  expect_error("ply\nformat binary_little_endian 1.0\n", "ascii");
  expect_error(
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
      "property float z\nend_header\n0 0 0\n1 1 1\n",
      "2 of 3");  // truncated: names the missing element count
  expect_error(
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
      "end_header\n0 0\n",
      "x,y,z");
  expect_error(
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
      "property float z\nend_header\n0 nan 0\n",
      "");  // non-finite coordinate rejected
}

TEST_CASE("manifest round trip with and without ground truth") {
  TempDir dir;
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 1, 1}};
  write_ply(cloud, (dir.path / "a.ply").string());
  write_ply(cloud, (dir.path / "b.ply").string());

  Rng rng(809);
  const RigidTransform gt = oracle::random_transform(rng);
  std::vector<ManifestWriteRow> rows;
  rows.push_back({"with_gt", "a.ply", "b.ply", gt, 0.5});
  rows.push_back({"without_gt", "a.ply", "b.ply", std::nullopt, std::nullopt});
  const std::string manifest_path = (dir.path / "pairs.csv").string();
  save_manifest(rows, manifest_path);

  const Manifest manifest = load_manifest(manifest_path);
  REQUIRE(manifest.entries.size() == 2);
  CHECK(manifest.entries[0].ground_truth.present());
  CHECK_FALSE(manifest.entries[1].ground_truth.present());
  CHECK(manifest.entries[0].achieved_overlap == 0.5);
  {
    gt_audit::EvalScope scope;
    const RigidTransform& loaded = manifest.entries[0].ground_truth.value();
    CHECK((loaded.rotation - gt.rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.translation == gt.translation);
  }

  // Duplicate ids and missing files are rejected.
  rows.push_back({"with_gt", "a.ply", "b.ply", std::nullopt, std::nullopt});
  save_manifest(rows, manifest_path);
  CHECK_THROWS_AS(load_manifest(manifest_path), Error);

  rows.pop_back();
  rows[0].file_a = "missing.ply";
  save_manifest(rows, manifest_path);
  CHECK_THROWS_AS(load_manifest(manifest_path), Error);
}

TEST_CASE("config: empty file gives protocol defaults") {
  const SgpConfig cfg = parse_config("", "empty");
  CHECK(cfg.iterations == 10);
  CHECK(cfg.ransac.max_iterations == 10000);
  CHECK(cfg.ransac.confidence == 0.999);
  CHECK(cfg.ransac.inlier_threshold == 0.07);
  CHECK(cfg.voxel_size == 0.05);
  CHECK(cfg.epochs_first == 100);
  CHECK(cfg.epochs_rest == 50);
  CHECK_FALSE(cfg.retrain);
  CHECK(cfg.verify_label);
  CHECK(cfg.eta_for_iteration(1) == 0.30);
  CHECK(cfg.eta_for_iteration(2) == 0.30);
  CHECK(cfg.eta_for_iteration(3) == 0.10);
  CHECK(cfg.eta_for_iteration(10) == 0.10);
  CHECK(cfg.skip_stable_after == 3);
  CHECK(cfg.skip_inlier_rate == 0.8);
}

TEST_CASE("config parsing: keys, comments, rejection of bad values") {
  const SgpConfig cfg = parse_config(
      "# comment line\n"
      "retrain = true\n"
      "iterations = 5  # trailing comment\n"
      "eta_schedule = 1-1:0.5,2-:0.25\n"
      "teacher = horn\n",
      "test");
  CHECK(cfg.retrain);
  CHECK(cfg.iterations == 5);
  CHECK(cfg.eta_for_iteration(1) == 0.5);
  CHECK(cfg.eta_for_iteration(5) == 0.25);
  CHECK(cfg.teacher == TeacherKind::horn);

  CHECK_THROWS_AS(parse_config("ransac_confidence = 1.5\n", "bad"), Error);
  CHECK_THROWS_AS(parse_config("unknown_key = 1\n", "bad"), Error);
  CHECK_THROWS_AS(parse_config("iterations\n", "bad"), Error);
  CHECK_THROWS_AS(parse_config("eta_schedule = 2-:0.1\n", "bad"), Error);   // iteration 1 uncovered
  CHECK_THROWS_AS(parse_config("margin_negative = 3\n", "bad"), Error);     // unreachable on sphere

  try {
    parse_config("ransac_confidence = 1.5\n", "bad");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("confidence") != std::string::npos);
  }
}

TEST_CASE("config snapshot round trip") {
  SgpConfig cfg;
  cfg.iterations = 7;
  cfg.retrain = true;
  cfg.verify_label = false;
  cfg.eta_schedule = {{1, 3, 0.4}, {4, 0, 0.05}};
  cfg.optimizer.learning_rate = 0.0125;
  cfg.seed = 987654321;
  cfg.hidden_dims = {32, 48};
  const std::string text = config_to_text(cfg);
  const SgpConfig parsed = parse_config(text, "snapshot");
  CHECK(config_to_text(parsed) == text);
  CHECK(parsed.iterations == 7);
  CHECK(parsed.retrain);
  CHECK_FALSE(parsed.verify_label);
  CHECK(parsed.optimizer.learning_rate == 0.0125);
  CHECK(parsed.seed == 987654321);
  CHECK(parsed.hidden_dims == std::vector<int>{32, 48});
}

TEST_CASE("labels csv round trip") {
  TempDir dir;
  Rng rng(811);
  std::vector<PseudoLabel> labels;
  for (int i = 0; i < 5; ++i) {
    PseudoLabel label;
    label.pair_id = "pair_" + std::to_string(i);
    label.transform = oracle::random_transform(rng);
    label.inlier_rate = rng.uniform(0.0, 1.0);
    label.overlap_ratio = rng.uniform(0.0, 1.0);
    label.has_model = true;
    label.verified = i % 2 == 0;
    label.skip = i == 3;
    labels.push_back(label);
  }
  const std::string path = (dir.path / "labels.csv").string();
  save_labels(labels, path);
  const auto loaded = load_labels(path);
  REQUIRE(loaded.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(loaded[i].pair_id == labels[i].pair_id);
    CHECK((loaded[i].transform.rotation - labels[i].transform.rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded[i].transform.translation == labels[i].transform.translation);
    CHECK(loaded[i].inlier_rate == labels[i].inlier_rate);
    CHECK(loaded[i].overlap_ratio == labels[i].overlap_ratio);
    CHECK(loaded[i].verified == labels[i].verified);
    CHECK(loaded[i].skip == labels[i].skip);
  }
}
