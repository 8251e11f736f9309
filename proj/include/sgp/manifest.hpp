#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgp/gt_audit.hpp"

namespace sgp {

struct ManifestEntry {
  std::string pair_id;
  std::string file_a;  // resolved absolute-ish path (manifest dir applied)
  std::string file_b;
  HiddenTransform ground_truth;  // absent when the manifest has no gt columns
  std::optional<double> achieved_overlap;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// CSV with header pair_id,file_a,file_b,r00..r22,t0,t1,t2,achieved_overlap.
/// Ground-truth cells may be empty. Relative cloud paths are resolved
/// against the manifest's directory; pair ids must be unique and both cloud
/// files must exist.
Manifest load_manifest(const std::string& path);

/// Writer used by the dataset generator; `ground_truth` rows are raw values
/// (generation side, before the audit wrapper takes over).
struct ManifestWriteRow {
  std::string pair_id;
  std::string file_a;  // stored as given (keep relative for portable dirs)
  std::string file_b;
  std::optional<RigidTransform> ground_truth;
  std::optional<double> achieved_overlap;
};
void save_manifest(const std::vector<ManifestWriteRow>& rows, const std::string& path);

}  // namespace sgp
