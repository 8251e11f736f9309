#include "sgp/ply_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sgp/errors.hpp"
#include "sgp/text.hpp"

namespace sgp {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  std::ostringstream msg;
  msg << name << ":" << line << ": " << what;
  throw Error(ErrorCode::parse, msg.str());
}

bool is_float_type(std::string_view t) {
  return t == "float" || t == "double" || t == "float32" || t == "float64";
}

}  // namespace

PointCloud read_ply_stream(std::istream& in, const std::string& name) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };

  if (!next_line() || trim(line) != "ply") fail(name, line_no, "missing 'ply' magic");

  long long vertex_count = -1;
  std::vector<std::string> properties;
  bool in_vertex_element = false;
  bool saw_format = false;

  while (true) {
    if (!next_line()) fail(name, line_no, "header ends before end_header");
    const auto tokens = split(trim(line), ' ');
    if (tokens.empty() || tokens[0].empty()) continue;
    const std::string_view keyword = tokens[0];
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      if (tokens.size() < 3 || tokens[1] != "ascii")
        fail(name, line_no, "only 'format ascii 1.0' is supported");
      saw_format = true;
      continue;
    }
    if (keyword == "element") {
      if (tokens.size() != 3) fail(name, line_no, "malformed element line");
      if (tokens[1] == "vertex") {
        vertex_count = parse_int(tokens[2]);
        if (vertex_count < 0) fail(name, line_no, "negative vertex count");
        in_vertex_element = true;
      } else {
        if (parse_int(tokens[2]) != 0)
          fail(name, line_no, "only the vertex element is supported");
        in_vertex_element = false;
      }
      continue;
    }
    if (keyword == "property") {
      if (!in_vertex_element) continue;
      if (tokens.size() == 3) {
        properties.emplace_back(tokens[2]);
        if ((tokens[2] == "x" || tokens[2] == "y" || tokens[2] == "z" || tokens[2] == "nx" ||
             tokens[2] == "ny" || tokens[2] == "nz") &&
            !is_float_type(tokens[1])) {
          fail(name, line_no, "coordinate properties must be float or double");
        }
      } else if (tokens.size() == 5 && tokens[1] == "list") {
        fail(name, line_no, "list properties are not supported on vertices");
      } else {
        fail(name, line_no, "malformed property line");
      }
      continue;
    }
    if (keyword == "end_header") break;
    fail(name, line_no, "unrecognized header keyword '" + std::string(keyword) + "'");
  }

  if (!saw_format) fail(name, line_no, "missing format line");
  if (vertex_count < 0) fail(name, line_no, "missing 'element vertex' declaration");

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  for (std::size_t i = 0; i < properties.size(); ++i) {
    const std::string& p = properties[i];
    if (p == "x") ix = static_cast<int>(i);
    else if (p == "y") iy = static_cast<int>(i);
    else if (p == "z") iz = static_cast<int>(i);
    else if (p == "nx") inx = static_cast<int>(i);
    else if (p == "ny") iny = static_cast<int>(i);
    else if (p == "nz") inz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) fail(name, line_no, "vertex element lacks x,y,z properties");
  const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  if (has_normals) cloud.normals.reserve(static_cast<std::size_t>(vertex_count));

  for (long long v = 0; v < vertex_count; ++v) {
    if (!next_line()) {
      std::ostringstream what;
      what << "file ends after " << v << " of " << vertex_count << " declared vertices";
      fail(name, line_no, what.str());
    }
    const auto tokens = split(trim(line), ' ');
    std::vector<std::string_view> cells;
    for (auto t : tokens)
      if (!t.empty()) cells.push_back(t);
    if (cells.size() != properties.size()) fail(name, line_no, "wrong number of vertex columns");

    const Vec3 p(parse_double(cells[ix]), parse_double(cells[iy]), parse_double(cells[iz]));
    if (!p.allFinite()) fail(name, line_no, "non-finite coordinate");
    cloud.points.push_back(p);
    if (has_normals) {
      const Vec3 n(parse_double(cells[inx]), parse_double(cells[iny]), parse_double(cells[inz]));
      if (!n.allFinite()) fail(name, line_no, "non-finite normal");
      cloud.normals.push_back(n);
    }
  }
  return cloud;
}

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open PLY file: " + path);
  return read_ply_stream(in, path);
}

void write_ply_stream(const PointCloud& cloud, std::ostream& out) {
  const bool normals = cloud.has_normals();
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (normals) out << "property double nx\nproperty double ny\nproperty double nz\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    if (normals) {
      const Vec3& n = cloud.normals[i];
      out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
          << format_double(n.z());
    }
    out << '\n';
  }
}

void write_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open PLY file for writing: " + path);
  write_ply_stream(cloud, out);
  if (!out) throw Error(ErrorCode::io, "failed writing PLY file: " + path);
}

}  // namespace sgp
