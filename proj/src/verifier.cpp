#include "sgp/verifier.hpp"

#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/text.hpp"

namespace sgp {

double overlap_ratio(const RigidTransform& transform, const PointCloud& cloud_a,
                     const PointCloud& cloud_b, const KdTree& tree_b, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "overlap_ratio: tau must be positive");
  if (cloud_a.empty() || cloud_b.empty())
    throw Error(ErrorCode::invalid_argument, "overlap_ratio: clouds must be nonempty");
  const double tau_sq = tau * tau;
  std::size_t close = 0;
  for (const Vec3& p : cloud_a.points) {
    const KdTree::Hit hit = tree_b.nearest(transform.apply(p));
    if (hit.sq_dist <= tau_sq) ++close;
  }
  return static_cast<double>(close) / static_cast<double>(cloud_a.size());
}

std::vector<int> verify_labels(std::vector<PseudoLabel>& labels, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw Error(ErrorCode::invalid_argument, "verify_labels: eta must lie in [0, 1]");
  std::vector<int> survivors;
  survivors.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pass = labels[i].has_model && labels[i].overlap_ratio >= eta;
    labels[i].verified = pass;
    if (pass) survivors.push_back(static_cast<int>(i));
  }
  return survivors;
}

double plsr(std::size_t survived, std::size_t total) {
  if (total == 0) throw Error(ErrorCode::invalid_argument, "plsr: total pair count must be positive");
  if (survived > total) throw Error(ErrorCode::invalid_argument, "plsr: |S| exceeds M");
  return 100.0 * static_cast<double>(survived) / static_cast<double>(total);
}

bool label_correct(const RigidTransform& label, const RigidTransform& ground_truth,
                   const SuccessTolerance& tols) {
  return rotation_error_deg(label.rotation, ground_truth.rotation) < tols.rotation_deg &&
         translation_error(label.translation, ground_truth.translation) < tols.translation;
}

double plir(const std::vector<int>& survivors, const std::vector<PseudoLabel>& labels,
            const std::vector<RigidTransform>& ground_truth, const SuccessTolerance& tols) {
  if (survivors.empty()) throw Error(ErrorCode::invalid_argument, "plir: empty verified set");
  std::size_t correct = 0;
  for (int i : survivors) {
    if (label_correct(labels[i].transform, ground_truth[i], tols)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(survivors.size());
}

double recall(const std::vector<RigidTransform>& estimates,
              const std::vector<RigidTransform>& ground_truth, const SuccessTolerance& tols) {
  if (estimates.size() != ground_truth.size())
    throw Error(ErrorCode::invalid_argument, "recall: estimate/ground-truth count mismatch");
  if (estimates.empty()) throw Error(ErrorCode::invalid_argument, "recall: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (label_correct(estimates[i], ground_truth[i], tols)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(estimates.size());
}

std::string metrics_to_csv(const std::vector<LoopMetrics>& rows) {
  std::ostringstream out;
  out << "iteration,plsr,plir,train_recall,test_recall\n";
  for (const LoopMetrics& row : rows) {
    out << row.iteration << ',' << format_double(row.plsr) << ',';
    if (row.plir) out << format_double(*row.plir);
    out << ',';
    if (row.train_recall) out << format_double(*row.train_recall);
    out << ',';
    if (row.test_recall) out << format_double(*row.test_recall);
    out << '\n';
  }
  return out.str();
}

std::vector<LoopMetrics> metrics_from_csv(const std::string& text) {
  std::vector<LoopMetrics> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (first) {
      first = false;
      if (view != "iteration,plsr,plir,train_recall,test_recall")
        throw Error(ErrorCode::parse, "metrics csv: unexpected header");
      continue;
    }
    const auto cells = split(view, ',');
    if (cells.size() != 5) throw Error(ErrorCode::parse, "metrics csv: expected 5 cells per row");
    LoopMetrics row;
    row.iteration = static_cast<int>(parse_int(trim(cells[0])));
    row.plsr = parse_double(trim(cells[1]));
    if (!trim(cells[2]).empty()) row.plir = parse_double(trim(cells[2]));
    if (!trim(cells[3]).empty()) row.train_recall = parse_double(trim(cells[3]));
    if (!trim(cells[4]).empty()) row.test_recall = parse_double(trim(cells[4]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sgp
