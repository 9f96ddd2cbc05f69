#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fracseg/error.hpp"
#include "fracseg/features.hpp"
#include "fracseg/orientation.hpp"
#include "fracseg/point_cloud.hpp"
#include "fracseg/region_growing.hpp"
#include "fracseg/stereonet_svg.hpp"

namespace fracseg {

enum class CloudFormat { automatic, xyz, ply };

struct LoadStats {
  std::size_t records = 0;
  std::size_t lines_with_extra_fields = 0;  // XYZ only
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size() && std::isfinite(out);
}

inline CloudFormat resolve_format(const std::filesystem::path& path, CloudFormat requested) {
  if (requested != CloudFormat::automatic) return requested;
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".ply") return CloudFormat::ply;
  if (ext == ".xyz" || ext == ".txt" || ext == ".asc" || ext == ".pts") return CloudFormat::xyz;
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return trim(first) == "ply" ? CloudFormat::ply : CloudFormat::xyz;
}

inline void load_xyz(std::istream& in, const std::string& name, PointCloud& cloud, LoadStats& stats) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_ws(body);
    if (fields.size() < 3)
      throw ParseError(name, lineno, "expected 3 coordinates, found " + std::to_string(fields.size()));
    Point3 p;
    for (int a = 0; a < 3; ++a)
      if (!parse_double(fields[a], p[a]))
        throw ParseError(name, lineno, "invalid coordinate '" + std::string(fields[a]) + "'");
    if (fields.size() > 3) ++stats.lines_with_extra_fields;
    cloud.points.push_back(p);
  }
}

inline void load_ply(std::istream& in, const std::string& name, PointCloud& cloud) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  std::string line;
  std::size_t lineno = 0;

  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    return true;
  };

  if (!next() || trim(line) != "ply") throw ParseError(name, 1, "missing 'ply' magic");
  bool ended = false;
  bool ascii = false;
  while (next()) {
    const auto f = split_ws(trim(line));
    if (f.empty()) continue;
    if (f[0] == "end_header") {
      ended = true;
      break;
    }
    if (f[0] == "format") {
      if (f.size() < 2) throw ParseError(name, lineno, "incomplete format line");
      if (f[1] != "ascii")
        throw ParseError(name, lineno, "unsupported PLY format '" + std::string(f[1]) + "' (only ascii is supported)");
      ascii = true;
    } else if (f[0] == "element") {
      if (f.size() != 3) throw ParseError(name, lineno, "malformed element line");
      Element e;
      e.name = std::string(f[1]);
      const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), e.count);
      if (ec != std::errc{} || ptr != f[2].data() + f[2].size())
        throw ParseError(name, lineno, "invalid element count");
      elements.push_back(std::move(e));
    } else if (f[0] == "property") {
      if (elements.empty()) throw ParseError(name, lineno, "property before any element");
      if (f.size() < 3) throw ParseError(name, lineno, "malformed property line");
      elements.back().properties.emplace_back(f.back());
    }
    // comment / obj_info lines are ignored
  }
  if (!ended) throw ParseError(name, lineno, "missing end_header");
  if (!ascii) throw ParseError(name, lineno, "missing format line");

  const auto vertex = std::find_if(elements.begin(), elements.end(), [](const Element& e) { return e.name == "vertex"; });
  if (vertex == elements.end()) throw Error(name + ": PLY has no vertex element");
  int col[3] = {-1, -1, -1};
  const char* axes[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    const auto it = std::find(vertex->properties.begin(), vertex->properties.end(), axes[a]);
    if (it == vertex->properties.end()) throw Error(name + ": PLY vertex element lacks property '" + axes[a] + "'");
    col[a] = static_cast<int>(it - vertex->properties.begin());
  }

  for (const Element& e : elements) {
    for (std::size_t r = 0; r < e.count; ++r) {
      if (!next()) throw ParseError(name, lineno + 1, "unexpected end of file in element '" + e.name + "'");
      if (&e != &*vertex) continue;
      const auto f = split_ws(trim(line));
      if (f.size() < e.properties.size())
        throw ParseError(name, lineno, "expected " + std::to_string(e.properties.size()) + " vertex fields, found " +
                                           std::to_string(f.size()));
      Point3 p;
      for (int a = 0; a < 3; ++a)
        if (!parse_double(f[static_cast<std::size_t>(col[a])], p[a]))
          throw ParseError(name, lineno, "invalid coordinate '" + std::string(f[static_cast<std::size_t>(col[a])]) + "'");
      cloud.points.push_back(p);
    }
  }
}

}  // namespace detail

/// Reads an ASCII XYZ or ASCII PLY file. Points keep file order.
inline PointCloud load_points(const std::filesystem::path& path, CloudFormat format = CloudFormat::automatic,
                              const Point3& viewpoint = {}, LoadStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  if (!is_finite(viewpoint)) throw Error("viewpoint must be finite");
  PointCloud cloud;
  cloud.viewpoint = viewpoint;
  LoadStats local;
  if (detail::resolve_format(path, format) == CloudFormat::ply) detail::load_ply(in, path.string(), cloud);
  else detail::load_xyz(in, path.string(), cloud, local);
  if (cloud.empty()) throw Error("'" + path.string() + "' contains no points");
  local.records = cloud.size();
  if (stats) *stats = local;
  return cloud;
}

/// Fixed 6-decimal formatting; negative zero prints as "0.000000".
inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return buf;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

inline void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error("output directory '" + dir.string() + "' is not writable");
}

}  // namespace detail

inline void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  for (const Point3& p : cloud.points) out << fmt6(p.x) << ' ' << fmt6(p.y) << ' ' << fmt6(p.z) << '\n';
  detail::close_checked(out, path);
}

inline void write_labels_csv(const PointCloud& cloud, std::span<const int> labels, const std::filesystem::path& path,
                             const char* label_column = "region") {
  if (labels.size() != cloud.size()) throw Error("label count does not match cloud size");
  auto out = detail::open_for_write(path);
  out << "index,x,y,z," << label_column << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    out << i << ',' << fmt6(p.x) << ',' << fmt6(p.y) << ',' << fmt6(p.z) << ',' << labels[i] << '\n';
  }
  detail::close_checked(out, path);
}

inline void write_regions_csv(std::span<const FractureRegion> regions, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "region,point_count,centroid_x,centroid_y,centroid_z,normal_x,normal_y,normal_z,"
         "dip_direction,dip,pole_trend,pole_plunge,rms_distance\n";
  for (const FractureRegion& r : regions) {
    out << r.id << ',' << r.point_indices.size() << ',' << fmt6(r.centroid.x) << ',' << fmt6(r.centroid.y) << ','
        << fmt6(r.centroid.z) << ',' << fmt6(r.plane_normal.x) << ',' << fmt6(r.plane_normal.y) << ','
        << fmt6(r.plane_normal.z) << ',' << fmt6(r.dip_direction) << ',' << fmt6(r.dip) << ','
        << fmt6(r.pole.trend) << ',' << fmt6(r.pole.plunge) << ',' << fmt6(r.rms_plane_distance) << '\n';
  }
  detail::close_checked(out, path);
}

inline void write_features_csv(std::span<const LocalFeatures> features, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "index,nx,ny,nz,sigma,degenerate\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    const LocalFeatures& f = features[i];
    out << i << ',' << fmt6(f.normal.x) << ',' << fmt6(f.normal.y) << ',' << fmt6(f.normal.z) << ','
        << fmt6(f.curvature) << ',' << (f.degenerate ? 1 : 0) << '\n';
  }
  detail::close_checked(out, path);
}

inline void write_trace_csv(std::span<const Admission> trace, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "step,region,point,admitting_seed,angle_to_seed,angle_to_nmin,promoted\n";
  for (const Admission& a : trace) {
    out << a.step << ',' << a.region << ',' << a.point << ',' << a.admitted_by << ',' << fmt6(a.angle_to_seed) << ','
        << fmt6(a.angle_to_initial) << ',' << (a.promoted ? 1 : 0) << '\n';
  }
  detail::close_checked(out, path);
}

struct WriteReport {
  std::vector<std::filesystem::path> files;
};

/// Writes labels.csv, regions.csv and poles.svg into `dir` (created if needed).
/// Output bytes depend only on the inputs.
inline WriteReport write_outputs(const PointCloud& cloud, const Classification& classes,
                                 std::span<const FractureRegion> regions, const std::filesystem::path& dir) {
  detail::ensure_directory(dir);
  WriteReport report;
  report.files = {dir / "labels.csv", dir / "regions.csv", dir / "poles.svg"};
  write_labels_csv(cloud, classes.labels, report.files[0]);
  write_regions_csv(regions, report.files[1]);
  auto svg = detail::open_for_write(report.files[2]);
  svg << render_pole_svg(regions);
  detail::close_checked(svg, report.files[2]);
  return report;
}

}  // namespace fracseg
