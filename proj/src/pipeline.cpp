#include "sgp/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/fpfh.hpp"
#include "sgp/manifest.hpp"
#include "sgp/ply_io.hpp"
#include "sgp/rng.hpp"
#include "sgp/text.hpp"

namespace fs = std::filesystem;

namespace sgp {

std::vector<DatasetPair> load_dataset_pairs(const std::string& manifest_path) {
  const Manifest manifest = load_manifest(manifest_path);
  std::vector<DatasetPair> pairs;
  pairs.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    DatasetPair pair;
    pair.id = entry.pair_id;
    pair.cloud_a = read_ply(entry.file_a);
    pair.cloud_b = read_ply(entry.file_b);
    pair.ground_truth = entry.ground_truth;
    pair.achieved_overlap = entry.achieved_overlap.value_or(0.0);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

namespace {
constexpr const char* kLabelsHeader =
    "pair_id,r00,r01,r02,r10,r11,r12,r20,r21,r22,t0,t1,t2,inlier_rate,overlap_ratio,verified,skip";
}

void save_labels(const std::vector<PseudoLabel>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open labels file for writing: " + path);
  out << kLabelsHeader << '\n';
  for (const PseudoLabel& label : labels) {
    out << label.pair_id;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << ',' << format_double(label.transform.rotation(r, c));
    for (int r = 0; r < 3; ++r) out << ',' << format_double(label.transform.translation[r]);
    out << ',' << format_double(label.inlier_rate) << ',' << format_double(label.overlap_ratio)
        << ',' << (label.verified ? 1 : 0) << ',' << (label.skip ? 1 : 0) << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "failed writing labels: " + path);
}

std::vector<PseudoLabel> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open labels file: " + path);
  std::vector<PseudoLabel> labels;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (first) {
      first = false;
      if (view != kLabelsHeader) throw Error(ErrorCode::parse, path + ":1: unexpected labels header");
      continue;
    }
    const auto cells = split(view, ',');
    if (cells.size() != 17)
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": expected 17 cells");
    PseudoLabel label;
    label.pair_id = std::string(trim(cells[0]));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) label.transform.rotation(r, c) = parse_double(trim(cells[1 + 3 * r + c]));
    for (int r = 0; r < 3; ++r) label.transform.translation[r] = parse_double(trim(cells[10 + r]));
    label.inlier_rate = parse_double(trim(cells[13]));
    label.overlap_ratio = parse_double(trim(cells[14]));
    label.verified = parse_int(trim(cells[15])) != 0;
    label.skip = parse_int(trim(cells[16])) != 0;
    label.has_model = true;
    labels.push_back(std::move(label));
  }
  return labels;
}

void write_run_directory(const SgpRunResult& result, const SgpConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  save_config(cfg, (fs::path(dir) / "config.txt").string());
  save_labels(result.labels, (fs::path(dir) / "labels.csv").string());

  {
    std::ofstream metrics((fs::path(dir) / "metrics.csv").string());
    if (!metrics) throw Error(ErrorCode::io, "cannot write metrics.csv in " + dir);
    metrics << metrics_to_csv(result.metrics);
  }
  {
    std::ofstream bootstrap_csv((fs::path(dir) / "bootstrap.csv").string());
    if (!bootstrap_csv) throw Error(ErrorCode::io, "cannot write bootstrap.csv in " + dir);
    bootstrap_csv << "train_recall,test_recall\n";
    if (result.bootstrap_train_recall) bootstrap_csv << format_double(*result.bootstrap_train_recall);
    bootstrap_csv << ',';
    if (result.bootstrap_test_recall) bootstrap_csv << format_double(*result.bootstrap_test_recall);
    bootstrap_csv << '\n';
  }

  for (std::size_t i = 0; i < result.iteration_models.size(); ++i) {
    std::ostringstream name;
    name << "model_iter_";
    const std::size_t iter = i + 1;
    if (iter < 10) name << "00";
    else if (iter < 100) name << "0";
    name << iter << ".sgpmlp";
    save_model(result.iteration_models[i], (fs::path(dir) / name.str()).string());
  }
  if (result.best_model) {
    save_model(*result.best_model, (fs::path(dir) / "model_best.sgpmlp").string());
  }
}

SgpRunResult run_sgp_files(const std::string& train_manifest, const std::string& test_manifest,
                           const std::string& validation_manifest, const SgpConfig& cfg,
                           const std::string& run_dir) {
  cfg.validate();
  const auto train_raw = load_dataset_pairs(train_manifest);
  const auto train = prepare_pairs(train_raw, cfg);

  std::vector<PreparedPair> test;
  if (!test_manifest.empty()) test = prepare_pairs(load_dataset_pairs(test_manifest), cfg);
  std::vector<PreparedPair> validation;
  if (!validation_manifest.empty())
    validation = prepare_pairs(load_dataset_pairs(validation_manifest), cfg);

  SgpRunResult result = run_sgp(train, test.empty() ? nullptr : &test,
                                validation.empty() ? nullptr : &validation, cfg);
  if (!run_dir.empty()) write_run_directory(result, cfg, run_dir);
  return result;
}

std::vector<PseudoLabel> bootstrap_files(const std::string& train_manifest, const SgpConfig& cfg,
                                         const std::string& out_labels_csv) {
  cfg.validate();
  const auto pairs = prepare_pairs(load_dataset_pairs(train_manifest), cfg);
  std::vector<PseudoLabel> labels = bootstrap(pairs, cfg);
  if (!out_labels_csv.empty()) save_labels(labels, out_labels_csv);
  return labels;
}

RegisterOutcome register_pair_files(const std::string& ply_a, const std::string& ply_b,
                                    const std::string& model_path, const SgpConfig& cfg) {
  cfg.validate();
  DatasetPair raw;
  raw.id = "pair";
  raw.cloud_a = read_ply(ply_a);
  raw.cloud_b = read_ply(ply_b);
  const PreparedPair pair = prepare_pair(raw, cfg);

  const MlpDescriptor model =
      model_path.empty() ? identity_model(kFpfhDim) : load_model(model_path);
  const auto emb_a = embed_active(model, pair.cloud_a, pair.active_a);
  const auto emb_b = embed_active(model, pair.cloud_b, pair.active_b);
  const LabelOutcome outcome =
      label_pair(pair, emb_a, emb_b, cfg, derive_seed(cfg.seed, 0x726567ULL, hash_string(pair.id)));
  if (!outcome.has_model)
    throw Error(ErrorCode::no_model, "registration failed: no model found for this pair");
  return {outcome.transform, outcome.inlier_rate, outcome.overlap_ratio};
}

double evaluate_files(const std::string& model_path, const std::string& manifest_path,
                      const SgpConfig& cfg) {
  cfg.validate();
  const auto pairs = prepare_pairs(load_dataset_pairs(manifest_path), cfg);
  return evaluate(load_model(model_path), pairs, cfg);
}

std::string export_metrics(const std::string& run_dir, const std::string& out_path) {
  const fs::path source = fs::path(run_dir) / "metrics.csv";
  if (!fs::exists(source))
    throw Error(ErrorCode::io, "no metrics.csv under run directory: " + run_dir);
  if (out_path.empty()) return source.string();
  fs::copy_file(source, out_path, fs::copy_options::overwrite_existing);
  return out_path;
}

}  // namespace sgp
