#include "sgp/config.hpp"

#include <fstream>
#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/text.hpp"

namespace sgp {

double SgpConfig::eta_for_iteration(int iteration) const {
  for (const EtaSpan& span : eta_schedule) {
    const int last = span.last == 0 ? iterations : span.last;
    if (iteration >= span.first && iteration <= last) return span.eta;
  }
  throw Error(ErrorCode::config, "eta_schedule does not cover iteration " + std::to_string(iteration));
}

std::vector<int> SgpConfig::student_dims(int input_dim) const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(embedding_dim);
  return dims;
}

void SgpConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::config, "iterations must be >= 1");
  if (epochs_first < 1 || epochs_rest < 1)
    throw Error(ErrorCode::config, "epochs_first and epochs_rest must be >= 1");
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::config, "voxel_size must be positive");
  if (normal_k < 3) throw Error(ErrorCode::config, "normal_k must be >= 3");
  if (!(fpfh_radius_factor > 0.0)) throw Error(ErrorCode::config, "fpfh_radius_factor must be positive");
  if (embedding_dim < 1) throw Error(ErrorCode::config, "embedding_dim must be >= 1");
  for (int d : hidden_dims)
    if (d < 1) throw Error(ErrorCode::config, "hidden_dims entries must be >= 1");
  if (skip_stable_after < 1) throw Error(ErrorCode::config, "skip_stable_after must be >= 1");
  if (!(skip_inlier_rate >= 0.0 && skip_inlier_rate <= 1.0))
    throw Error(ErrorCode::config, "skip_inlier_rate must lie in [0, 1]");
  if (icp_max_iterations < 1) throw Error(ErrorCode::config, "icp_max_iterations must be >= 1");
  if (threads < 0) throw Error(ErrorCode::config, "threads must be >= 0");
  if (!(optimizer.learning_rate > 0.0)) throw Error(ErrorCode::config, "learning_rate must be positive");
  if (!(optimizer.momentum >= 0.0 && optimizer.momentum < 1.0))
    throw Error(ErrorCode::config, "momentum must lie in [0, 1)");
  if (optimizer.max_anchors_per_pair < 0)
    throw Error(ErrorCode::config, "max_anchors_per_pair must be >= 0");
  ransac.validate();
  loss.validate(normalize_output);

  // Coverage check: the schedule must assign exactly one eta to each of 1..T.
  for (int it = 1; it <= iterations; ++it) {
    int hits = 0;
    for (const EtaSpan& span : eta_schedule) {
      const int last = span.last == 0 ? iterations : span.last;
      if (it >= span.first && it <= last) ++hits;
    }
    if (hits == 0)
      throw Error(ErrorCode::config, "eta_schedule leaves iteration " + std::to_string(it) + " uncovered");
    if (hits > 1)
      throw Error(ErrorCode::config, "eta_schedule overlaps at iteration " + std::to_string(it));
    if (const double eta = eta_for_iteration(it); !(eta >= 0.0 && eta <= 1.0))
      throw Error(ErrorCode::config, "eta_schedule values must lie in [0, 1]");
  }
}

namespace {

bool parse_bool(std::string_view value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::config, key + ": expected true/false");
}

std::vector<SgpConfig::EtaSpan> parse_eta_schedule(std::string_view value, const std::string& key) {
  std::vector<SgpConfig::EtaSpan> spans;
  for (std::string_view item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::config, key + ": expected range:eta items");
    std::string_view range = trim(item.substr(0, colon));
    const double eta = parse_double(trim(item.substr(colon + 1)));
    SgpConfig::EtaSpan span;
    span.eta = eta;
    const auto dash = range.find('-');
    if (dash == std::string_view::npos) {
      span.first = static_cast<int>(parse_int(range));
      span.last = span.first;
    } else {
      span.first = static_cast<int>(parse_int(trim(range.substr(0, dash))));
      const std::string_view tail = trim(range.substr(dash + 1));
      span.last = tail.empty() ? 0 : static_cast<int>(parse_int(tail));
    }
    spans.push_back(span);
  }
  if (spans.empty()) throw Error(ErrorCode::config, key + ": empty schedule");
  return spans;
}

std::string eta_schedule_to_text(const std::vector<SgpConfig::EtaSpan>& spans) {
  std::ostringstream out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i) out << ',';
    out << spans[i].first << '-';
    if (spans[i].last != 0) out << spans[i].last;
    out << ':' << format_double(spans[i].eta);
  }
  return out.str();
}

std::vector<int> parse_int_list(std::string_view value, const std::string& key) {
  std::vector<int> dims;
  for (std::string_view item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    dims.push_back(static_cast<int>(parse_int(item)));
  }
  if (dims.empty()) throw Error(ErrorCode::config, key + ": empty list");
  return dims;
}

}  // namespace

void apply_config_override(SgpConfig& c, const std::string& key, const std::string& raw_value) {
  const std::string value{trim(raw_value)};
  try {
    if (key == "iterations") c.iterations = static_cast<int>(parse_int(value));
    else if (key == "retrain") c.retrain = parse_bool(value, key);
    else if (key == "verify_label") c.verify_label = parse_bool(value, key);
    else if (key == "eta_schedule") c.eta_schedule = parse_eta_schedule(value, key);
    else if (key == "ransac_max_iterations") c.ransac.max_iterations = static_cast<int>(parse_int(value));
    else if (key == "ransac_confidence") c.ransac.confidence = parse_double(value);
    else if (key == "inlier_threshold") c.ransac.inlier_threshold = parse_double(value);
    else if (key == "teacher") {
      if (value == "ransac") c.teacher = TeacherKind::ransac;
      else if (value == "horn") c.teacher = TeacherKind::horn;
      else throw Error(ErrorCode::config, "teacher: expected ransac or horn");
    } else if (key == "voxel_size") c.voxel_size = parse_double(value);
    else if (key == "normal_k") c.normal_k = static_cast<int>(parse_int(value));
    else if (key == "fpfh_radius_factor") c.fpfh_radius_factor = parse_double(value);
    else if (key == "margin_positive") c.loss.margin_positive = parse_double(value);
    else if (key == "margin_negative") c.loss.margin_negative = parse_double(value);
    else if (key == "margin_triplet") c.loss.margin_triplet = parse_double(value);
    else if (key == "lambda_positive") c.loss.lambda_positive = parse_double(value);
    else if (key == "lambda_negative") c.loss.lambda_negative = parse_double(value);
    else if (key == "lambda_triplet") c.loss.lambda_triplet = parse_double(value);
    else if (key == "negatives_per_anchor") c.loss.negatives_per_anchor = static_cast<int>(parse_int(value));
    else if (key == "hidden_dims") c.hidden_dims = parse_int_list(value, key);
    else if (key == "embedding_dim") c.embedding_dim = static_cast<int>(parse_int(value));
    else if (key == "normalize_output") c.normalize_output = parse_bool(value, key);
    else if (key == "learning_rate") c.optimizer.learning_rate = parse_double(value);
    else if (key == "momentum") c.optimizer.momentum = parse_double(value);
    else if (key == "max_anchors_per_pair") c.optimizer.max_anchors_per_pair = static_cast<int>(parse_int(value));
    else if (key == "epochs_first") c.epochs_first = static_cast<int>(parse_int(value));
    else if (key == "epochs_rest") c.epochs_rest = static_cast<int>(parse_int(value));
    else if (key == "skip_stable_after") c.skip_stable_after = static_cast<int>(parse_int(value));
    else if (key == "skip_inlier_rate") c.skip_inlier_rate = parse_double(value);
    else if (key == "icp_max_iterations") c.icp_max_iterations = static_cast<int>(parse_int(value));
    else if (key == "seed") c.seed = static_cast<uint64_t>(parse_int(value));
    else if (key == "threads") c.threads = static_cast<int>(parse_int(value));
    else throw Error(ErrorCode::config, "unknown config key '" + key + "'");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse)
      throw Error(ErrorCode::config, key + ": " + e.what());
    throw;
  }
}

SgpConfig parse_config(const std::string& text, const std::string& name) {
  SgpConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = trim(view.substr(0, hash));
    }
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::config, name + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key{trim(view.substr(0, eq))};
    const std::string value{trim(view.substr(eq + 1))};
    apply_config_override(config, key, value);
  }
  config.validate();
  return config;
}

SgpConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string config_to_text(const SgpConfig& c) {
  std::ostringstream out;
  out << "iterations = " << c.iterations << '\n';
  out << "retrain = " << (c.retrain ? "true" : "false") << '\n';
  out << "verify_label = " << (c.verify_label ? "true" : "false") << '\n';
  out << "eta_schedule = " << eta_schedule_to_text(c.eta_schedule) << '\n';
  out << "teacher = " << (c.teacher == TeacherKind::ransac ? "ransac" : "horn") << '\n';
  out << "ransac_max_iterations = " << c.ransac.max_iterations << '\n';
  out << "ransac_confidence = " << format_double(c.ransac.confidence) << '\n';
  out << "inlier_threshold = " << format_double(c.ransac.inlier_threshold) << '\n';
  out << "voxel_size = " << format_double(c.voxel_size) << '\n';
  out << "normal_k = " << c.normal_k << '\n';
  out << "fpfh_radius_factor = " << format_double(c.fpfh_radius_factor) << '\n';
  out << "margin_positive = " << format_double(c.loss.margin_positive) << '\n';
  out << "margin_negative = " << format_double(c.loss.margin_negative) << '\n';
  out << "margin_triplet = " << format_double(c.loss.margin_triplet) << '\n';
  out << "lambda_positive = " << format_double(c.loss.lambda_positive) << '\n';
  out << "lambda_negative = " << format_double(c.loss.lambda_negative) << '\n';
  out << "lambda_triplet = " << format_double(c.loss.lambda_triplet) << '\n';
  out << "negatives_per_anchor = " << c.loss.negatives_per_anchor << '\n';
  std::ostringstream dims;
  for (std::size_t i = 0; i < c.hidden_dims.size(); ++i) {
    if (i) dims << ',';
    dims << c.hidden_dims[i];
  }
  out << "hidden_dims = " << dims.str() << '\n';
  out << "embedding_dim = " << c.embedding_dim << '\n';
  out << "normalize_output = " << (c.normalize_output ? "true" : "false") << '\n';
  out << "learning_rate = " << format_double(c.optimizer.learning_rate) << '\n';
  out << "momentum = " << format_double(c.optimizer.momentum) << '\n';
  out << "max_anchors_per_pair = " << c.optimizer.max_anchors_per_pair << '\n';
  out << "epochs_first = " << c.epochs_first << '\n';
  out << "epochs_rest = " << c.epochs_rest << '\n';
  out << "skip_stable_after = " << c.skip_stable_after << '\n';
  out << "skip_inlier_rate = " << format_double(c.skip_inlier_rate) << '\n';
  out << "icp_max_iterations = " << c.icp_max_iterations << '\n';
  out << "seed = " << c.seed << '\n';
  out << "threads = " << c.threads << '\n';
  return out.str();
}

void save_config(const SgpConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open config file for writing: " + path);
  out << config_to_text(config);
  if (!out) throw Error(ErrorCode::io, "failed writing config: " + path);
}

}  // namespace sgp
