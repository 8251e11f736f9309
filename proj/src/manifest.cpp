#include "sgp/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sgp/errors.hpp"
#include "sgp/text.hpp"

namespace fs = std::filesystem;

namespace sgp {

namespace {
constexpr const char* kHeader =
    "pair_id,file_a,file_b,r00,r01,r02,r10,r11,r12,r20,r21,r22,t0,t1,t2,achieved_overlap";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();

  Manifest manifest;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (first) {
      first = false;
      if (view != kHeader)
        throw Error(ErrorCode::parse, path + ":1: unexpected manifest header");
      continue;
    }
    const auto cells = split(view, ',');
    if (cells.size() != 16) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected 16 cells, got " << cells.size();
      throw Error(ErrorCode::parse, msg.str());
    }

    ManifestEntry entry;
    entry.pair_id = std::string(trim(cells[0]));
    if (entry.pair_id.empty())
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": empty pair_id");
    if (!seen_ids.insert(entry.pair_id).second)
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": duplicate pair_id '" + entry.pair_id + "'");

    auto resolve = [&](std::string_view rel) {
      fs::path p{std::string(rel)};
      if (p.is_relative()) p = base / p;
      if (!fs::exists(p))
        throw Error(ErrorCode::io, path + ":" + std::to_string(line_no) + ": cloud file does not exist: " + p.string());
      return p.string();
    };
    entry.file_a = resolve(trim(cells[1]));
    entry.file_b = resolve(trim(cells[2]));

    bool any_gt = false;
    bool all_gt = true;
    for (int c = 3; c < 15; ++c) {
      if (trim(cells[c]).empty()) all_gt = false;
      else any_gt = true;
    }
    if (any_gt && !all_gt)
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": partial ground-truth row");
    if (all_gt) {
      RigidTransform gt;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) gt.rotation(r, c) = parse_double(trim(cells[3 + 3 * r + c]));
      for (int r = 0; r < 3; ++r) gt.translation[r] = parse_double(trim(cells[12 + r]));
      entry.ground_truth = HiddenTransform(gt);
    }
    if (!trim(cells[15]).empty()) entry.achieved_overlap = parse_double(trim(cells[15]));
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const std::vector<ManifestWriteRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open manifest for writing: " + path);
  out << kHeader << '\n';
  for (const auto& row : rows) {
    out << row.pair_id << ',' << row.file_a << ',' << row.file_b;
    if (row.ground_truth) {
      const RigidTransform& gt = *row.ground_truth;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ',' << format_double(gt.rotation(r, c));
      for (int r = 0; r < 3; ++r) out << ',' << format_double(gt.translation[r]);
    } else {
      for (int i = 0; i < 12; ++i) out << ',';
    }
    out << ',';
    if (row.achieved_overlap) out << format_double(*row.achieved_overlap);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "failed writing manifest: " + path);
}

}  // namespace sgp
