#include "sgp/sgp_loop.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/fpfh.hpp"
#include "sgp/matching.hpp"
#include "sgp/parallel.hpp"
#include "sgp/rng.hpp"
#include "sgp/teacher.hpp"

namespace sgp {

namespace {
// Seed stream tags.
constexpr uint64_t kTagTeacher = 0x7465616368ULL;
constexpr uint64_t kTagTrain = 0x747261696eULL;
constexpr uint64_t kTagInit = 0x696e6974ULL;
constexpr uint64_t kTagEval = 0x6576616cULL;
}  // namespace

PreparedPair prepare_pair(const DatasetPair& pair, const SgpConfig& cfg) {
  PreparedPair prepared;
  prepared.id = pair.id;
  prepared.ground_truth = pair.ground_truth;

  const double radius = cfg.fpfh_radius_factor * cfg.voxel_size;
  auto process = [&](const PointCloud& raw) {
    PointCloud cloud = voxel_downsample(raw, cfg.voxel_size);
    const int k = std::min<int>(cfg.normal_k, static_cast<int>(cloud.size()));
    if (k < 3) throw Error(ErrorCode::invalid_argument, "prepare_pair: too few points after voxelization");
    cloud = estimate_normals(cloud, k);
    cloud.descriptors = compute_fpfh(cloud, radius);
    return cloud;
  };
  prepared.cloud_a = process(pair.cloud_a);
  prepared.cloud_b = process(pair.cloud_b);
  prepared.active_a = nonzero_descriptor_indices(prepared.cloud_a.descriptors);
  prepared.active_b = nonzero_descriptor_indices(prepared.cloud_b.descriptors);
  prepared.tree_b = KdTree::from_points(prepared.cloud_b.points);
  return prepared;
}

std::vector<PreparedPair> prepare_pairs(const std::vector<DatasetPair>& pairs, const SgpConfig& cfg) {
  std::vector<PreparedPair> out(pairs.size());
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) { out[i] = prepare_pair(pairs[i], cfg); });
  return out;
}

std::vector<Eigen::VectorXd> embed_active(const MlpDescriptor& model, const PointCloud& cloud,
                                          const std::vector<int>& active) {
  std::vector<Eigen::VectorXd> out;
  if (active.empty()) return out;
  Eigen::MatrixXd inputs(cloud.descriptors.front().size(), active.size());
  for (std::size_t i = 0; i < active.size(); ++i) inputs.col(i) = cloud.descriptors[active[i]];
  const Eigen::MatrixXd embeddings = mlp_forward_batch(model, inputs);
  out.reserve(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) out.push_back(embeddings.col(i));
  return out;
}

MlpDescriptor identity_model(int dim) {
  MlpDescriptor model;
  model.weights.push_back(Eigen::MatrixXd::Identity(dim, dim));
  model.biases.push_back(Eigen::VectorXd::Zero(dim));
  model.normalize_output = false;
  return model;
}

LabelOutcome label_pair(const PreparedPair& pair, const std::vector<Eigen::VectorXd>& emb_a,
                        const std::vector<Eigen::VectorXd>& emb_b, const SgpConfig& cfg,
                        uint64_t teacher_seed) {
  LabelOutcome outcome;
  if (emb_a.empty() || emb_b.empty()) return outcome;

  const auto matches_ab = match_nn(emb_a, emb_b);
  const auto matches_ba = match_nn(emb_b, emb_a);
  const auto mutual = cross_check(matches_ab, matches_ba);

  std::vector<Correspondence> corrs;
  corrs.reserve(mutual.size());
  for (const Correspondence& m : mutual) {
    corrs.push_back({pair.active_a[m.index_a], pair.active_b[m.index_b], m.feature_distance});
  }

  std::optional<TeacherResult> teacher;
  if (cfg.teacher == TeacherKind::ransac) {
    RansacConfig ransac = cfg.ransac;
    ransac.seed = teacher_seed;
    teacher = ransac_register(corrs, pair.cloud_a, pair.cloud_b, ransac);
  } else {
    teacher = horn_direct_teacher(corrs, pair.cloud_a, pair.cloud_b);
  }
  if (!teacher) return outcome;

  const IcpResult icp = icp_refine(teacher->transform, pair.cloud_a, pair.cloud_b, pair.tree_b,
                                   cfg.icp_max_iterations, cfg.ransac.inlier_threshold);

  outcome.has_model = true;
  outcome.transform = icp.transform;
  outcome.inlier_rate = teacher->inlier_rate;  // solver confidence, pre-refinement
  outcome.overlap_ratio = overlap_ratio(outcome.transform, pair.cloud_a, pair.cloud_b, pair.tree_b,
                                        cfg.ransac.inlier_threshold);
  return outcome;
}

namespace {

PseudoLabel outcome_to_label(const std::string& id, const LabelOutcome& outcome) {
  PseudoLabel label;
  label.pair_id = id;
  label.transform = outcome.transform;
  label.inlier_rate = outcome.inlier_rate;
  label.overlap_ratio = outcome.overlap_ratio;
  label.has_model = outcome.has_model;
  return label;
}

/// Ground truths for all pairs, or nothing if any pair lacks one. Reads are
/// audited; callers wrap this in an EvalScope.
std::optional<std::vector<RigidTransform>> gather_ground_truth(const std::vector<PreparedPair>& pairs) {
  for (const PreparedPair& p : pairs) {
    if (!p.ground_truth.present()) return std::nullopt;
  }
  std::vector<RigidTransform> out;
  out.reserve(pairs.size());
  for (const PreparedPair& p : pairs) out.push_back(p.ground_truth.value());
  return out;
}

std::vector<RigidTransform> label_transforms(const std::vector<PseudoLabel>& labels) {
  std::vector<RigidTransform> out;
  out.reserve(labels.size());
  for (const PseudoLabel& l : labels) out.push_back(l.transform);
  return out;
}

}  // namespace

std::vector<PseudoLabel> bootstrap(const std::vector<PreparedPair>& pairs, const SgpConfig& cfg) {
  std::vector<PseudoLabel> labels(pairs.size());
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
    const PreparedPair& pair = pairs[i];
    std::vector<Eigen::VectorXd> fpfh_a;
    fpfh_a.reserve(pair.active_a.size());
    for (int idx : pair.active_a) fpfh_a.push_back(pair.cloud_a.descriptors[idx]);
    std::vector<Eigen::VectorXd> fpfh_b;
    fpfh_b.reserve(pair.active_b.size());
    for (int idx : pair.active_b) fpfh_b.push_back(pair.cloud_b.descriptors[idx]);

    const LabelOutcome outcome =
        label_pair(pair, fpfh_a, fpfh_b, cfg, derive_seed(cfg.seed, kTagTeacher, hash_string(pair.id), 0));
    labels[i] = outcome_to_label(pair.id, outcome);
  });
  return labels;
}

double evaluate(const MlpDescriptor& model, const std::vector<PreparedPair>& eval_pairs,
                const SgpConfig& cfg) {
  if (eval_pairs.empty()) throw Error(ErrorCode::invalid_argument, "evaluate: empty evaluation set");

  // Registration at test time always uses the robust teacher, also in the
  // non-robust-teacher ablation runs.
  SgpConfig eval_cfg = cfg;
  eval_cfg.teacher = TeacherKind::ransac;

  std::vector<RigidTransform> estimates(eval_pairs.size());
  parallel_for(eval_pairs.size(), cfg.threads, [&](std::size_t i) {
    const PreparedPair& pair = eval_pairs[i];
    const auto emb_a = embed_active(model, pair.cloud_a, pair.active_a);
    const auto emb_b = embed_active(model, pair.cloud_b, pair.active_b);
    const LabelOutcome outcome =
        label_pair(pair, emb_a, emb_b, eval_cfg, derive_seed(cfg.seed, kTagEval, hash_string(pair.id)));
    estimates[i] = outcome.has_model ? outcome.transform : RigidTransform::identity();
  });

  gt_audit::EvalScope scope;
  const auto ground_truth = gather_ground_truth(eval_pairs);
  if (!ground_truth)
    throw Error(ErrorCode::invalid_argument, "evaluate: evaluation pairs must carry ground truth");
  return recall(estimates, *ground_truth, SuccessTolerance{});
}

SgpRunResult run_sgp(const std::vector<PreparedPair>& train, const std::vector<PreparedPair>* test,
                     const std::vector<PreparedPair>* validation, const SgpConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw Error(ErrorCode::invalid_argument, "run_sgp: empty dataset");
  const std::size_t pair_count = train.size();
  const int input_dim = kFpfhDim;

  SgpRunResult result;
  result.labels = bootstrap(train, cfg);

  // Bootstrap recalls (diagnostics; require hidden ground truth).
  {
    gt_audit::EvalScope scope;
    if (const auto gts = gather_ground_truth(train)) {
      result.bootstrap_train_recall = recall(label_transforms(result.labels), *gts, SuccessTolerance{});
    }
  }
  if (test && !test->empty()) {
    bool test_has_gt = true;
    for (const PreparedPair& p : *test) test_has_gt = test_has_gt && p.ground_truth.present();
    if (test_has_gt) {
      result.bootstrap_test_recall = evaluate(identity_model(input_dim), *test, cfg);
    }
  }

  MlpDescriptor model = init_weights(cfg.student_dims(input_dim), derive_seed(cfg.seed, kTagInit, 0),
                                     InitMode::fresh, nullptr, cfg.normalize_output);
  double best_val_recall = -1.0;
  int plir_below_recall = 0;

  for (int tau = 1; tau <= cfg.iterations; ++tau) {
    // Verifier: S indexes the labels the student may read this iteration.
    std::vector<int> survivors;
    if (cfg.verify_label) {
      survivors = verify_labels(result.labels, cfg.eta_for_iteration(tau));
    } else {
      survivors.resize(pair_count);
      for (std::size_t i = 0; i < pair_count; ++i) {
        survivors[i] = static_cast<int>(i);
        result.labels[i].verified = true;
      }
    }

    LoopMetrics row;
    row.iteration = tau;
    row.plsr = plsr(survivors.size(), pair_count);
    {
      gt_audit::EvalScope scope;
      if (!survivors.empty()) {
        if (const auto gts = gather_ground_truth(train)) {
          row.plir = plir(survivors, result.labels, *gts, SuccessTolerance{});
        }
      }
    }

    // Student step on the S-restricted labels.
    if (survivors.empty()) {
      std::ostringstream msg;
      msg << "iteration " << tau << ": empty verified set, student step skipped";
      result.diagnostics.push_back(msg.str());
    } else {
      MlpDescriptor init = cfg.retrain
                               ? init_weights(cfg.student_dims(input_dim),
                                              derive_seed(cfg.seed, kTagInit, tau), InitMode::fresh,
                                              nullptr, cfg.normalize_output)
                               : model;
      std::vector<StudentPair> student_pairs;
      student_pairs.reserve(survivors.size());
      for (int i : survivors) {
        const PreparedPair& pair = train[i];
        student_pairs.push_back({pair.id, &pair.cloud_a, &pair.cloud_b, &pair.tree_b,
                                 result.labels[i].transform});
      }
      const int epochs = tau == 1 ? cfg.epochs_first : cfg.epochs_rest;
      TrainStats stats;
      model = train_student(init, student_pairs, epochs, cfg.optimizer, cfg.loss,
                            cfg.ransac.inlier_threshold, derive_seed(cfg.seed, kTagTrain, tau), &stats);

      // Self-supervision audit: the student may only consume verified pairs.
      std::set<std::string> allowed;
      for (int i : survivors) allowed.insert(train[i].id);
      for (const std::string& id : stats.consumed_pair_ids) {
        if (!allowed.count(id))
          throw Error(ErrorCode::internal, "student consumed unverified pair " + id);
      }
      if (stats.batches_skipped_empty > 0) {
        std::ostringstream msg;
        msg << "iteration " << tau << ": " << stats.batches_skipped_empty
            << " pairs produced empty batches";
        result.diagnostics.push_back(msg.str());
      }
    }

    // Teacher relabeling with the updated descriptor; skipped labels stay.
    std::vector<PseudoLabel> updated = result.labels;
    parallel_for(pair_count, cfg.threads, [&](std::size_t i) {
      PseudoLabel& label = updated[i];
      if (label.skip) return;
      const PreparedPair& pair = train[i];
      const auto emb_a = embed_active(model, pair.cloud_a, pair.active_a);
      const auto emb_b = embed_active(model, pair.cloud_b, pair.active_b);
      const LabelOutcome outcome = label_pair(
          pair, emb_a, emb_b, cfg, derive_seed(cfg.seed, kTagTeacher, hash_string(pair.id), tau));

      const PseudoLabel& previous = result.labels[i];
      PseudoLabel next = outcome_to_label(pair.id, outcome);
      next.verified = previous.verified;
      if (outcome.has_model && previous.has_model &&
          rotation_error_deg(next.transform.rotation, previous.transform.rotation) < 0.5 &&
          translation_error(next.transform.translation, previous.transform.translation) < 0.005) {
        next.stable_count = previous.stable_count + 1;
      } else {
        next.stable_count = 0;
      }
      // Stable or high-confidence labels are frozen for the rest of the run.
      if (next.stable_count >= cfg.skip_stable_after ||
          (next.has_model && next.inlier_rate > cfg.skip_inlier_rate)) {
        next.skip = true;
      }
      label = next;
    });
    result.labels = std::move(updated);

    {
      gt_audit::EvalScope scope;
      if (const auto gts = gather_ground_truth(train)) {
        row.train_recall = recall(label_transforms(result.labels), *gts, SuccessTolerance{});
      }
    }
    if (test && !test->empty()) {
      bool test_has_gt = true;
      for (const PreparedPair& p : *test) test_has_gt = test_has_gt && p.ground_truth.present();
      if (test_has_gt) row.test_recall = evaluate(model, *test, cfg);
    }
    if (validation && !validation->empty()) {
      const double val_recall = evaluate(model, *validation, cfg);
      if (val_recall > best_val_recall) {
        best_val_recall = val_recall;
        result.best_model = model;
      }
    }

    // Soft expectation, observed rather than guaranteed: the verified set
    // should be at least as clean as the overall label pool.
    if (row.plir && row.train_recall && *row.plir < *row.train_recall) {
      ++plir_below_recall;
      std::ostringstream msg;
      msg << "iteration " << tau << ": plir " << *row.plir << " fell below train recall "
          << *row.train_recall;
      result.diagnostics.push_back(msg.str());
    }

    result.iteration_models.push_back(model);
    result.metrics.push_back(row);
  }

  if (plir_below_recall == cfg.iterations && cfg.iterations > 1) {
    result.diagnostics.push_back("alarm: plir stayed below train recall at every iteration");
  }

  result.final_model = std::move(model);
  return result;
}

}  // namespace sgp
