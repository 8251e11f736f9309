#include "sgp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/kdtree.hpp"
#include "sgp/rng.hpp"

namespace sgp {

void MlpDescriptor::validate() const {
  if (weights.empty()) throw Error(ErrorCode::invalid_argument, "mlp: no layers");
  if (biases.size() != weights.size())
    throw Error(ErrorCode::invalid_argument, "mlp: bias/weight layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].size() != weights[l].rows())
      throw Error(ErrorCode::invalid_argument, "mlp: bias length does not match layer rows");
    if (l > 0 && weights[l].cols() != weights[l - 1].rows())
      throw Error(ErrorCode::invalid_argument, "mlp: layer dimensions do not chain");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw Error(ErrorCode::numeric, "mlp: non-finite parameters");
  }
}

MlpDescriptor init_weights(const std::vector<int>& dims, uint64_t seed, InitMode mode,
                           const MlpDescriptor* source, bool normalize_output) {
  if (mode == InitMode::from_model) {
    if (!source) throw Error(ErrorCode::invalid_argument, "init_weights: from_model needs a source");
    return *source;
  }
  if (dims.size() < 2) throw Error(ErrorCode::invalid_argument, "init_weights: need at least two dims");
  for (int d : dims)
    if (d <= 0) throw Error(ErrorCode::invalid_argument, "init_weights: dims must be positive");

  MlpDescriptor model;
  model.normalize_output = normalize_output;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-a, a);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

namespace {

// Column-batched forward/backward: inputs are stacked as columns so the
// layer maps become single matrix products.
struct BatchCache {
  std::vector<Eigen::MatrixXd> activations;  // a_0 .. a_L (a_L = pre-norm outputs)
  std::vector<Eigen::MatrixXd> pre;          // z_0 .. z_{L-1}
  Eigen::MatrixXd embeddings;
  Eigen::VectorXd pre_norms;                 // per column; only with normalization
  std::vector<char> zero_cols;
};

void forward_batch(const MlpDescriptor& model, const Eigen::MatrixXd& inputs, BatchCache& cache) {
  const std::size_t layers = model.layer_count();
  cache.activations.resize(layers + 1);
  cache.pre.resize(layers);
  cache.activations[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    cache.pre[l].noalias() = model.weights[l] * cache.activations[l];
    cache.pre[l].colwise() += model.biases[l];
    if (l + 1 < layers) {
      cache.activations[l + 1] = cache.pre[l].cwiseMax(0.0);
    } else {
      cache.activations[l + 1] = cache.pre[l];
    }
  }
  const Eigen::MatrixXd& output = cache.activations[layers];
  const Eigen::Index cols = output.cols();
  cache.zero_cols.assign(cols, 0);
  if (model.normalize_output) {
    cache.embeddings.resize(output.rows(), cols);
    cache.pre_norms = output.colwise().norm();
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (cache.pre_norms[c] == 0.0) {
        // Fixed fallback embedding e1; flagged so gradients stay zero.
        cache.embeddings.col(c).setZero();
        cache.embeddings(0, c) = 1.0;
        cache.zero_cols[c] = 1;
      } else {
        cache.embeddings.col(c) = output.col(c) / cache.pre_norms[c];
      }
    }
  } else {
    cache.embeddings = output;
  }
}

void backward_batch(const MlpDescriptor& model, const BatchCache& cache,
                    const Eigen::MatrixXd& grad_embeddings, MlpGradient& grad) {
  const std::size_t layers = model.layer_count();
  Eigen::MatrixXd grad_a;
  if (model.normalize_output) {
    grad_a.resize(grad_embeddings.rows(), grad_embeddings.cols());
    for (Eigen::Index c = 0; c < grad_embeddings.cols(); ++c) {
      if (cache.zero_cols[c]) {
        grad_a.col(c).setZero();  // constant fallback embedding
        continue;
      }
      const auto e = cache.embeddings.col(c);
      const auto g = grad_embeddings.col(c);
      grad_a.col(c) = (g - e * e.dot(g)) / cache.pre_norms[c];
    }
  } else {
    grad_a = grad_embeddings;
  }
  for (std::size_t l = layers; l-- > 0;) {
    Eigen::MatrixXd dz;
    if (l + 1 == layers) {
      dz = std::move(grad_a);
    } else {
      dz = (cache.pre[l].array() > 0.0).select(grad_a, 0.0);
    }
    grad.weights[l].noalias() += dz * cache.activations[l].transpose();
    grad.biases[l] += dz.rowwise().sum();
    if (l > 0) grad_a.noalias() = model.weights[l].transpose() * dz;
  }
}

double hinge(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

Eigen::VectorXd mlp_forward(const MlpDescriptor& model, const Eigen::VectorXd& input,
                            bool* zero_flag) {
  if (model.weights.empty()) throw Error(ErrorCode::invalid_argument, "mlp_forward: empty model");
  if (input.size() != model.weights.front().cols())
    throw Error(ErrorCode::invalid_argument, "mlp_forward: input dimension mismatch");
  BatchCache cache;
  forward_batch(model, input, cache);
  if (zero_flag) *zero_flag = cache.zero_cols[0] != 0;
  return cache.embeddings.col(0);
}

Eigen::MatrixXd mlp_forward_batch(const MlpDescriptor& model, const Eigen::MatrixXd& inputs,
                                  std::vector<char>* zero_flags) {
  if (model.weights.empty()) throw Error(ErrorCode::invalid_argument, "mlp_forward_batch: empty model");
  if (inputs.rows() != model.weights.front().cols())
    throw Error(ErrorCode::invalid_argument, "mlp_forward_batch: input dimension mismatch");
  BatchCache cache;
  forward_batch(model, inputs, cache);
  if (zero_flags) *zero_flags = cache.zero_cols;
  return cache.embeddings;
}

void LossConfig::validate(bool normalized_embeddings) const {
  if (!(margin_negative > margin_positive && margin_positive >= 0.0))
    throw Error(ErrorCode::config, "loss margins must satisfy m_n > m_p >= 0");
  if (margin_triplet < 0.0) throw Error(ErrorCode::config, "triplet margin must be nonnegative");
  if (lambda_positive < 0.0 || lambda_negative < 0.0 || lambda_triplet < 0.0)
    throw Error(ErrorCode::config, "loss weights must be nonnegative");
  if (lambda_positive == 0.0 && lambda_negative == 0.0 && lambda_triplet == 0.0)
    throw Error(ErrorCode::config, "at least one loss weight must be positive");
  if (negatives_per_anchor < 1) throw Error(ErrorCode::config, "negatives_per_anchor must be >= 1");
  // On the unit sphere feature distances live in [0, 2]; a larger m_n could
  // never be satisfied.
  if (normalized_embeddings && margin_negative > 2.0)
    throw Error(ErrorCode::config, "margin_negative must be <= 2 with normalized embeddings");
}

TrainingBatch generate_training_pairs(const PointCloud& cloud_a, const PointCloud& cloud_b,
                                      const KdTree& tree_b, const RigidTransform& label,
                                      double c_bar, const LossConfig& cfg, uint64_t seed) {
  if (!cloud_a.has_descriptors() || !cloud_b.has_descriptors())
    throw Error(ErrorCode::invalid_argument, "generate_training_pairs: clouds need input histograms");
  if (!(c_bar > 0.0)) throw Error(ErrorCode::invalid_argument, "generate_training_pairs: c_bar must be positive");

  TrainingBatch batch;
  const double exclusion = 2.0 * c_bar;
  const double exclusion_sq = exclusion * exclusion;
  std::vector<int> qualifying;

  for (std::size_t i = 0; i < cloud_a.size(); ++i) {
    const Vec3 moved = label.apply(cloud_a.points[i]);
    const KdTree::Hit hit = tree_b.nearest(moved);
    if (!(std::sqrt(hit.sq_dist) < c_bar)) continue;

    qualifying.clear();
    for (std::size_t j = 0; j < cloud_b.size(); ++j) {
      if ((cloud_b.points[j] - moved).squaredNorm() >= exclusion_sq) {
        qualifying.push_back(static_cast<int>(j));
      }
    }
    if (qualifying.empty()) continue;

    Rng rng(derive_seed(seed, 0x6e65676174697665ULL, i));
    std::vector<int> picked;
    const int want = cfg.negatives_per_anchor;
    if (static_cast<int>(qualifying.size()) <= want) {
      picked = qualifying;
    } else {
      // Partial Fisher-Yates over the qualifying list.
      for (int t = 0; t < want; ++t) {
        const std::size_t swap_at = t + rng.uniform_int(qualifying.size() - t);
        std::swap(qualifying[t], qualifying[swap_at]);
        picked.push_back(qualifying[t]);
      }
    }

    batch.anchor_indices.push_back(static_cast<int>(i));
    batch.positive_indices.push_back(hit.index);
    batch.negative_indices.push_back(picked);
    batch.anchors.push_back(cloud_a.descriptors[i]);
    batch.positives.push_back(cloud_b.descriptors[hit.index]);
    std::vector<Eigen::VectorXd> neg_descs;
    neg_descs.reserve(picked.size());
    for (int j : picked) neg_descs.push_back(cloud_b.descriptors[j]);
    batch.negatives.push_back(std::move(neg_descs));
  }
  return batch;
}

void MlpGradient::scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
}

namespace {

void check_batch(const TrainingBatch& batch) {
  if (batch.empty()) throw Error(ErrorCode::invalid_argument, "loss: empty batch");
  if (batch.positives.size() != batch.anchors.size())
    throw Error(ErrorCode::invalid_argument, "loss: anchor/positive count mismatch");
  for (const auto& negs : batch.negatives)
    if (negs.empty()) throw Error(ErrorCode::invalid_argument, "loss: every anchor needs a negative");
}

// Hinge-squared contrastive + triplet loss over the anchors in
// `anchor_subset` (all when null). Columns are laid out per anchor as
// [anchor, positive, negatives...]; one batched forward plus, when `grad`
// is given, one batched backward.
double loss_impl(const MlpDescriptor& model, const TrainingBatch& batch, const LossConfig& cfg,
                 MlpGradient* grad, const std::vector<int>* anchor_subset) {
  check_batch(batch);
  model.validate();

  std::vector<int> all;
  if (!anchor_subset) {
    all.resize(batch.size());
    std::iota(all.begin(), all.end(), 0);
    anchor_subset = &all;
  }

  const Eigen::Index input_dim = model.weights.front().cols();
  Eigen::Index columns = 0;
  for (int i : *anchor_subset) {
    columns += 2 + static_cast<Eigen::Index>(batch.negatives[i].size());
  }

  Eigen::MatrixXd inputs(input_dim, columns);
  {
    Eigen::Index col = 0;
    for (int i : *anchor_subset) {
      if (batch.anchors[i].size() != input_dim)
        throw Error(ErrorCode::invalid_argument, "loss: input dimension mismatch");
      inputs.col(col++) = batch.anchors[i];
      inputs.col(col++) = batch.positives[i];
      for (const auto& neg : batch.negatives[i]) inputs.col(col++) = neg;
    }
  }

  BatchCache cache;
  forward_batch(model, inputs, cache);
  const Eigen::MatrixXd& emb = cache.embeddings;

  if (grad) {
    grad->weights.clear();
    grad->biases.clear();
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      grad->weights.emplace_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
      grad->biases.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }
  }
  Eigen::MatrixXd grad_emb;
  if (grad) grad_emb = Eigen::MatrixXd::Zero(emb.rows(), emb.cols());

  double total = 0.0;
  Eigen::Index col = 0;
  for (int i : *anchor_subset) {
    const Eigen::Index a_col = col;
    const Eigen::Index p_col = col + 1;
    const Eigen::Index negs_begin = col + 2;
    const Eigen::Index n_neg = static_cast<Eigen::Index>(batch.negatives[i].size());
    col += 2 + n_neg;

    const double dp = (emb.col(a_col) - emb.col(p_col)).norm();
    const double hp = hinge(dp - cfg.margin_positive);
    total += cfg.lambda_positive * hp * hp;
    double d_dp = 2.0 * cfg.lambda_positive * hp;  // d(loss)/d(dp)

    for (Eigen::Index j = 0; j < n_neg; ++j) {
      const Eigen::Index n_col = negs_begin + j;
      const double dn = (emb.col(a_col) - emb.col(n_col)).norm();
      const double hn = hinge(cfg.margin_negative - dn);
      const double ht = hinge(dp + cfg.margin_triplet - dn);
      total += cfg.lambda_negative * hn * hn + cfg.lambda_triplet * ht * ht;
      if (grad) {
        d_dp += 2.0 * cfg.lambda_triplet * ht;
        const double d_dn = -2.0 * cfg.lambda_negative * hn - 2.0 * cfg.lambda_triplet * ht;
        if (dn > 0.0 && d_dn != 0.0) {
          const Eigen::VectorXd unit = (emb.col(a_col) - emb.col(n_col)) / dn;
          grad_emb.col(a_col) += d_dn * unit;
          grad_emb.col(n_col) -= d_dn * unit;
        }
      }
    }
    if (grad && dp > 0.0 && d_dp != 0.0) {
      const Eigen::VectorXd unit = (emb.col(a_col) - emb.col(p_col)) / dp;
      grad_emb.col(a_col) += d_dp * unit;
      grad_emb.col(p_col) -= d_dp * unit;
    }
  }

  if (grad) backward_batch(model, cache, grad_emb, *grad);
  return total;
}

}  // namespace

double mlp_loss(const MlpDescriptor& model, const TrainingBatch& batch, const LossConfig& cfg) {
  return loss_impl(model, batch, cfg, nullptr, nullptr);
}

double mlp_loss_gradient(const MlpDescriptor& model, const TrainingBatch& batch,
                         const LossConfig& cfg, MlpGradient& grad) {
  return loss_impl(model, batch, cfg, &grad, nullptr);
}

MlpDescriptor train_student(const MlpDescriptor& init, const std::vector<StudentPair>& pairs,
                            int epochs, const OptimizerSettings& opt, const LossConfig& loss_cfg,
                            double c_bar, uint64_t seed, TrainStats* stats) {
  init.validate();
  loss_cfg.validate(init.normalize_output);
  if (pairs.empty()) throw Error(ErrorCode::invalid_argument, "train_student: no training pairs");
  if (epochs < 0) throw Error(ErrorCode::invalid_argument, "train_student: negative epochs");

  if (stats) *stats = TrainStats{};
  MlpDescriptor model = init;
  if (epochs == 0) return model;

  // Correspondence generation is a function of the label, not the epoch:
  // each pair's batch is built once. Only the index triplets are cached;
  // histogram columns are gathered from the clouds at step time.
  std::vector<TrainingBatch> batches(pairs.size());
  std::vector<bool> used(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const StudentPair& sp = pairs[i];
    batches[i] = generate_training_pairs(*sp.cloud_a, *sp.cloud_b, *sp.tree_b, sp.label, c_bar,
                                         loss_cfg, derive_seed(seed, hash_string(sp.pair_id)));
    if (batches[i].empty() && stats) ++stats->batches_skipped_empty;
    batches[i].anchors.clear();
    batches[i].anchors.shrink_to_fit();
    batches[i].positives.clear();
    batches[i].positives.shrink_to_fit();
    batches[i].negatives.clear();
    batches[i].negatives.shrink_to_fit();
  }

  MlpGradient grad;
  MlpGradient velocity;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    velocity.weights.emplace_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    velocity.biases.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> subset;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(seed, 0x7368756666ULL, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_int(i)]);
    }

    double epoch_loss = 0.0;
    int steps = 0;
    for (std::size_t idx : order) {
      TrainingBatch& batch = batches[idx];
      if (batch.anchor_indices.empty()) continue;

      const int n_anchors = static_cast<int>(batch.anchor_indices.size());
      subset.resize(n_anchors);
      std::iota(subset.begin(), subset.end(), 0);
      int used_anchors = n_anchors;
      if (opt.max_anchors_per_pair > 0 && n_anchors > opt.max_anchors_per_pair) {
        Rng pick_rng(derive_seed(seed, 0x616e63686f72ULL ^ static_cast<uint64_t>(epoch), idx));
        for (int t = 0; t < opt.max_anchors_per_pair; ++t) {
          const std::size_t swap_at = t + pick_rng.uniform_int(subset.size() - t);
          std::swap(subset[t], subset[swap_at]);
        }
        subset.resize(opt.max_anchors_per_pair);
        std::sort(subset.begin(), subset.end());
        used_anchors = opt.max_anchors_per_pair;
      }

      // Gather the step's histogram columns from the clouds.
      TrainingBatch step;
      step.anchors.reserve(subset.size());
      const PointCloud& cloud_a = *pairs[idx].cloud_a;
      const PointCloud& cloud_b = *pairs[idx].cloud_b;
      for (int s : subset) {
        step.anchors.push_back(cloud_a.descriptors[batch.anchor_indices[s]]);
        step.positives.push_back(cloud_b.descriptors[batch.positive_indices[s]]);
        std::vector<Eigen::VectorXd> negs;
        negs.reserve(batch.negative_indices[s].size());
        for (int j : batch.negative_indices[s]) negs.push_back(cloud_b.descriptors[j]);
        step.negatives.push_back(std::move(negs));
      }

      const double batch_loss = loss_impl(model, step, loss_cfg, &grad, nullptr);
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "train_student: non-finite loss at epoch " << epoch << " pair " << pairs[idx].pair_id;
        throw Error(ErrorCode::numeric, msg.str());
      }
      grad.scale(1.0 / used_anchors);  // step on the mean anchor loss

      for (std::size_t l = 0; l < model.layer_count(); ++l) {
        velocity.weights[l] = opt.momentum * velocity.weights[l] - opt.learning_rate * grad.weights[l];
        velocity.biases[l] = opt.momentum * velocity.biases[l] - opt.learning_rate * grad.biases[l];
        model.weights[l] += velocity.weights[l];
        model.biases[l] += velocity.biases[l];
      }

      epoch_loss += batch_loss / used_anchors;
      ++steps;
      used[idx] = true;
    }

    if (stats && steps > 0) {
      const double mean = epoch_loss / steps;
      if (epoch == 0) stats->first_epoch_mean_loss = mean;
      stats->last_epoch_mean_loss = mean;
    }
  }

  if (stats) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (used[i]) stats->consumed_pair_ids.push_back(pairs[i].pair_id);
    }
  }
  return model;
}

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw Error(ErrorCode::parse, "model checkpoint truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw Error(ErrorCode::parse, "model checkpoint truncated");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(bytes[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr char kMagic[] = "SGPMLP1";  // 7 bytes on the wire

}  // namespace

void write_model(const MlpDescriptor& model, std::ostream& out) {
  model.validate();
  out.write(kMagic, 7);
  put_u32(out, static_cast<uint32_t>(model.layer_count()));
  for (const auto& w : model.weights) {
    put_u32(out, static_cast<uint32_t>(w.rows()));
    put_u32(out, static_cast<uint32_t>(w.cols()));
  }
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) put_f64(out, model.biases[l][r]);
  }
  const char flags = model.normalize_output ? 1 : 0;
  out.write(&flags, 1);
  if (!out) throw Error(ErrorCode::io, "failed writing model checkpoint");
}

MlpDescriptor read_model(std::istream& in) {
  char magic[7];
  in.read(magic, 7);
  if (!in || std::memcmp(magic, kMagic, 7) != 0)
    throw Error(ErrorCode::parse, "not an SGPMLP1 checkpoint");
  const uint32_t layers = get_u32(in);
  if (layers == 0 || layers > 64) throw Error(ErrorCode::parse, "checkpoint layer count out of range");
  std::vector<std::pair<uint32_t, uint32_t>> shapes(layers);
  for (auto& [rows, cols] : shapes) {
    rows = get_u32(in);
    cols = get_u32(in);
    if (rows == 0 || cols == 0 || rows > 65536 || cols > 65536)
      throw Error(ErrorCode::parse, "checkpoint layer shape out of range");
  }
  MlpDescriptor model;
  for (const auto& [rows, cols] : shapes) {
    Eigen::MatrixXd w(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c) w(r, c) = get_f64(in);
    Eigen::VectorXd b(rows);
    for (uint32_t r = 0; r < rows; ++r) b[r] = get_f64(in);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  char flags = 0;
  in.read(&flags, 1);
  if (!in) throw Error(ErrorCode::parse, "model checkpoint truncated");
  model.normalize_output = (flags & 1) != 0;
  model.validate();
  return model;
}

void save_model(const MlpDescriptor& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open model file for writing: " + path);
  write_model(model, out);
}

MlpDescriptor load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open model file: " + path);
  return read_model(in);
}

}  // namespace sgp
