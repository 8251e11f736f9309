#include "sgp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "sgp/errors.hpp"
#include "sgp/kdtree.hpp"
#include "sgp/manifest.hpp"
#include "sgp/ply_io.hpp"
#include "sgp/rng.hpp"
#include "sgp/verifier.hpp"

namespace fs = std::filesystem;

namespace sgp {

void PairSpec::validate() const {
  if (!(target_overlap > 0.0 && target_overlap <= 1.0))
    throw Error(ErrorCode::config, "pair spec: target_overlap must lie in (0, 1]");
  if (!(clutter_fraction >= 0.0 && clutter_fraction < 1.0))
    throw Error(ErrorCode::config, "pair spec: clutter_fraction must lie in [0, 1)");
  if (noise_sigma < 0.0) throw Error(ErrorCode::config, "pair spec: noise_sigma must be nonnegative");
  if (rot_min_deg < 0.0 || rot_max_deg < rot_min_deg)
    throw Error(ErrorCode::config, "pair spec: bad rotation magnitude range");
  if (trans_min < 0.0 || trans_max < trans_min)
    throw Error(ErrorCode::config, "pair spec: bad translation magnitude range");
}

SceneSpec default_scene_spec() { return SceneSpec{}; }
PairSpec default_pair_spec() { return PairSpec{}; }

namespace {

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-9) return v / n;
  }
}

Mat3 random_rotation(Rng& rng) {
  return axis_angle_rotation(random_unit(rng), rng.uniform(0.0, 360.0));
}

struct Primitive {
  enum class Kind { plane, sphere, cylinder, box } kind;
  Vec3 center;
  Mat3 orientation;
  Vec3 extent;  // kind-specific sizes
  double area() const;
  void sample(int count, Rng& rng, std::vector<Vec3>& out) const;
};

double Primitive::area() const {
  switch (kind) {
    case Kind::plane:
      return extent.x() * extent.y();
    case Kind::sphere:
      return 4.0 * M_PI * extent.x() * extent.x();
    case Kind::cylinder:
      return 2.0 * M_PI * extent.x() * extent.y();  // lateral surface only
    case Kind::box:
      return 2.0 * (extent.x() * extent.y() + extent.y() * extent.z() + extent.x() * extent.z());
  }
  return 0.0;
}

void Primitive::sample(int count, Rng& rng, std::vector<Vec3>& out) const {
  for (int i = 0; i < count; ++i) {
    Vec3 local = Vec3::Zero();
    switch (kind) {
      case Kind::plane:
        local = Vec3(rng.uniform(-0.5, 0.5) * extent.x(), rng.uniform(-0.5, 0.5) * extent.y(), 0.0);
        break;
      case Kind::sphere:
        local = random_unit(rng) * extent.x();
        break;
      case Kind::cylinder: {
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        local = Vec3(extent.x() * std::cos(angle), extent.x() * std::sin(angle),
                     rng.uniform(-0.5, 0.5) * extent.y());
        break;
      }
      case Kind::box: {
        // Pick a face weighted by area, then a point on it.
        const double ax = extent.y() * extent.z();
        const double ay = extent.x() * extent.z();
        const double az = extent.x() * extent.y();
        const double pick = rng.uniform(0.0, ax + ay + az);
        const double sign = rng.uniform() < 0.5 ? -0.5 : 0.5;
        const double u = rng.uniform(-0.5, 0.5);
        const double v = rng.uniform(-0.5, 0.5);
        if (pick < ax) {
          local = Vec3(sign * extent.x(), u * extent.y(), v * extent.z());
        } else if (pick < ax + ay) {
          local = Vec3(u * extent.x(), sign * extent.y(), v * extent.z());
        } else {
          local = Vec3(u * extent.x(), v * extent.y(), sign * extent.z());
        }
        break;
      }
    }
    out.push_back(center + orientation * local);
  }
}

}  // namespace

PointCloud make_scene(const SceneSpec& spec) {
  if (spec.points_per_scene < 500)
    throw Error(ErrorCode::config, "scene spec: points_per_scene must be >= 500");
  if (!(spec.min_size > 0.0 && spec.max_size >= spec.min_size))
    throw Error(ErrorCode::config, "scene spec: bad size range");
  const int total_primitives = spec.planes + spec.spheres + spec.cylinders + spec.boxes;
  if (total_primitives <= 0) throw Error(ErrorCode::config, "scene spec: no primitives");

  Rng rng(spec.seed);
  std::vector<Primitive> primitives;
  auto place = [&](Primitive::Kind kind, int count) {
    for (int i = 0; i < count; ++i) {
      Primitive prim;
      prim.kind = kind;
      prim.center = Vec3(rng.uniform(-1.6, 1.6), rng.uniform(-1.2, 1.2), rng.uniform(1.4, 4.2));
      prim.orientation = random_rotation(rng);
      const double size = rng.uniform(spec.min_size, spec.max_size);
      switch (kind) {
        case Primitive::Kind::plane:
          prim.extent = Vec3(size, rng.uniform(spec.min_size, spec.max_size), 0.0);
          break;
        case Primitive::Kind::sphere:
          prim.extent = Vec3(size * 0.5, 0.0, 0.0);
          break;
        case Primitive::Kind::cylinder:
          prim.extent = Vec3(size * 0.25, size, 0.0);  // radius, height
          break;
        case Primitive::Kind::box:
          prim.extent = Vec3(size, rng.uniform(spec.min_size, spec.max_size),
                             rng.uniform(spec.min_size, spec.max_size));
          break;
      }
      primitives.push_back(prim);
    }
  };
  place(Primitive::Kind::plane, spec.planes);
  place(Primitive::Kind::sphere, spec.spheres);
  place(Primitive::Kind::cylinder, spec.cylinders);
  place(Primitive::Kind::box, spec.boxes);

  double total_area = 0.0;
  for (const auto& prim : primitives) total_area += prim.area();

  std::vector<int> counts(primitives.size());
  double scale = spec.sampling_density;
  if (total_area * scale < spec.points_per_scene) {
    scale = spec.points_per_scene / total_area;
  }
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    counts[i] = std::max(1, static_cast<int>(std::lround(primitives[i].area() * scale)));
  }

  PointCloud scene;
  scene.points.reserve(std::accumulate(counts.begin(), counts.end(), 0));
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    primitives[i].sample(counts[i], rng, scene.points);
  }
  return scene;
}

namespace {

RigidTransform random_pair_transform(const PairSpec& spec, Rng& rng) {
  RigidTransform t;
  t.rotation = axis_angle_rotation(random_unit(rng), rng.uniform(spec.rot_min_deg, spec.rot_max_deg));
  t.translation = random_unit(rng) * rng.uniform(spec.trans_min, spec.trans_max);
  return t;
}

// Overlap between the self-measured crops is judged with the default
// registration inlier radius.
constexpr double kOverlapTau = 0.07;

}  // namespace

RawPair make_pair(const PointCloud& scene, const PairSpec& spec, uint64_t seed) {
  spec.validate();
  if (scene.size() < 10) throw Error(ErrorCode::invalid_argument, "make_pair: scene too small");

  Rng rng(derive_seed(seed, 0x70616972ULL));
  RawPair best;
  double best_gap = std::numeric_limits<double>::infinity();

  const RigidTransform t_gt = random_pair_transform(spec, rng);
  const int n = static_cast<int>(scene.size());
  std::vector<double> projections(n);
  std::vector<double> sorted;

  double crop_fraction = spec.target_overlap;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng attempt_rng(derive_seed(seed, 0x63726f70ULL, attempt));
    const Vec3 axis = random_unit(attempt_rng);
    for (int i = 0; i < n; ++i) projections[i] = axis.dot(scene.points[i]);
    sorted = projections;
    std::sort(sorted.begin(), sorted.end());

    // Balanced halves: |A| = |B| = m with intersection fraction f needs
    // m = N / (2 - f).
    const double f = std::clamp(crop_fraction, 0.02, 1.0);
    const int m = std::clamp(static_cast<int>(std::lround(n / (2.0 - f))), 1, n);
    const double thr_a = sorted[m - 1];
    const double thr_b = sorted[n - m];

    RawPair candidate;
    candidate.ground_truth = t_gt;
    for (int i = 0; i < n; ++i) {
      if (projections[i] <= thr_a) candidate.cloud_a.points.push_back(scene.points[i]);
    }
    std::vector<Vec3> b_source;
    for (int i = 0; i < n; ++i) {
      if (projections[i] >= thr_b) b_source.push_back(scene.points[i]);
    }
    if (candidate.cloud_a.size() < 4 || b_source.size() < 4) continue;

    candidate.cloud_b.points.reserve(b_source.size());
    for (const Vec3& p : b_source) {
      Vec3 moved = t_gt.apply(p);
      if (spec.noise_sigma > 0.0) {
        moved += Vec3(attempt_rng.normal(0.0, spec.noise_sigma),
                      attempt_rng.normal(0.0, spec.noise_sigma),
                      attempt_rng.normal(0.0, spec.noise_sigma));
      }
      candidate.cloud_b.points.push_back(moved);
    }

    if (spec.clutter_fraction > 0.0) {
      Vec3 lo = candidate.cloud_b.points.front();
      Vec3 hi = lo;
      for (const Vec3& p : candidate.cloud_b.points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      const int n_clutter = static_cast<int>(std::lround(spec.clutter_fraction * b_source.size()));
      for (int i = 0; i < n_clutter; ++i) {
        candidate.cloud_b.points.emplace_back(attempt_rng.uniform(lo.x(), hi.x()),
                                              attempt_rng.uniform(lo.y(), hi.y()),
                                              attempt_rng.uniform(lo.z(), hi.z()));
      }
    }

    const KdTree tree_b = KdTree::from_points(candidate.cloud_b.points);
    candidate.achieved_overlap =
        overlap_ratio(t_gt, candidate.cloud_a, candidate.cloud_b, tree_b, kOverlapTau);

    const double gap = std::abs(candidate.achieved_overlap - spec.target_overlap);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(candidate);
    }
    if (best_gap <= 0.05) {
      best.overlap_tuned = true;
      return best;
    }
    crop_fraction = std::clamp(crop_fraction + 0.8 * (spec.target_overlap - candidate.achieved_overlap),
                               0.02, 1.0);
  }
  best.overlap_tuned = false;  // best effort after 100 attempts
  return best;
}

PairDataset make_dataset(int n_train, int n_test, const SceneSpec& scene_spec,
                         const PairSpec& pair_spec, uint64_t seed, const std::string* write_dir) {
  if (n_train < 0 || n_test < 0)
    throw Error(ErrorCode::invalid_argument, "make_dataset: negative pair counts");

  struct RawNamed {
    std::string id;
    RawPair pair;
  };
  auto generate_split = [&](const char* prefix, int count, uint64_t split_tag) {
    std::vector<RawNamed> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
      SceneSpec scene = scene_spec;
      scene.seed = derive_seed(seed, split_tag, 0x7363656eULL, i);
      const PointCloud cloud = make_scene(scene);
      RawNamed named;
      named.id = std::string(prefix) + "_" + (i < 10 ? "000" : i < 100 ? "00" : i < 1000 ? "0" : "") +
                 std::to_string(i);
      named.pair = make_pair(cloud, pair_spec, derive_seed(seed, split_tag, 0x70616972ULL, i));
      out.push_back(std::move(named));
    }
    return out;
  };

  std::vector<RawNamed> raw_train = generate_split("train", n_train, 1);
  std::vector<RawNamed> raw_test = generate_split("test", n_test, 2);

  if (write_dir) {
    const fs::path dir(*write_dir);
    fs::create_directories(dir / "clouds");
    auto write_split = [&](const std::vector<RawNamed>& raws, const char* manifest_name) {
      std::vector<ManifestWriteRow> rows;
      for (const RawNamed& named : raws) {
        const std::string rel_a = "clouds/" + named.id + "_a.ply";
        const std::string rel_b = "clouds/" + named.id + "_b.ply";
        write_ply(named.pair.cloud_a, (dir / rel_a).string());
        write_ply(named.pair.cloud_b, (dir / rel_b).string());
        rows.push_back({named.id, rel_a, rel_b, named.pair.ground_truth, named.pair.achieved_overlap});
      }
      save_manifest(rows, (dir / manifest_name).string());
    };
    write_split(raw_train, "train.csv");
    write_split(raw_test, "test.csv");
  }

  PairDataset dataset;
  auto wrap = [](std::vector<RawNamed>& raws, std::vector<DatasetPair>& out) {
    out.reserve(raws.size());
    for (RawNamed& named : raws) {
      DatasetPair pair;
      pair.id = std::move(named.id);
      pair.cloud_a = std::move(named.pair.cloud_a);
      pair.cloud_b = std::move(named.pair.cloud_b);
      pair.ground_truth = HiddenTransform(named.pair.ground_truth);
      pair.achieved_overlap = named.pair.achieved_overlap;
      out.push_back(std::move(pair));
    }
  };
  wrap(raw_train, dataset.train);
  wrap(raw_test, dataset.test);
  return dataset;
}

}  // namespace sgp
