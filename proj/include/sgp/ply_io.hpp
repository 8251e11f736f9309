#pragma once

#include <iosfwd>
#include <string>

#include "sgp/geometry.hpp"

namespace sgp {

/// ASCII PLY reader. Requires x,y,z vertex properties (float or double),
/// accepts optional nx,ny,nz, skips other per-vertex columns. Malformed
/// headers, element count mismatches, and non-finite values raise
/// sgp::Error with the offending line number.
PointCloud read_ply(const std::string& path);
PointCloud read_ply_stream(std::istream& in, const std::string& name);

/// ASCII PLY writer; coordinates (and normals, when present) are emitted in
/// shortest round-trip decimal form so write-then-read is exact.
void write_ply(const PointCloud& cloud, const std::string& path);
void write_ply_stream(const PointCloud& cloud, std::ostream& out);

}  // namespace sgp
