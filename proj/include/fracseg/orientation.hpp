#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracseg/kdtree.hpp"
#include "fracseg/point_cloud.hpp"
#include "fracseg/sym_eigen.hpp"
#include "fracseg/vec3.hpp"

namespace fracseg {

struct PlaneFit {
  Vec3 normal;     // unit, upward (n_z >= 0)
  Point3 centroid;
  double rms = 0.0;  // RMS point-to-plane distance, meters
};

struct DipAngles {
  double dip_direction = 0.0;  // [0, 360), clockwise from north (+y)
  double dip = 0.0;            // [0, 90]
};

struct Pole {
  double trend = 0.0;   // [0, 360)
  double plunge = 0.0;  // [0, 90]
  double px = 0.0;      // equal-area plot coordinates, +y north
  double py = 0.0;
};

struct FractureRegion {
  int id = 0;
  std::vector<PointIndex> point_indices;
  Point3 centroid;
  Vec3 plane_normal;
  double dip_direction = 0.0;
  double dip = 0.0;
  Pole pole;
  double rms_plane_distance = 0.0;
};

/// Flips a direction into the upper hemisphere. Horizontal vectors prefer
/// +y, then +x.
inline Vec3 upward(Vec3 n) {
  bool flip = false;
  if (n.z != 0.0) flip = n.z < 0.0;
  else if (n.y != 0.0) flip = n.y < 0.0;
  else flip = n.x < 0.0;
  return flip ? -n : n;
}

/// Total-least-squares plane through the points.
inline PlaneFit fit_plane(std::span<const Point3> points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_plane: need at least 3 points, got " + std::to_string(points.size()));
  PlaneFit fit;
  const EigenDecomp eig = eig_sym3(covariance_of(points, &fit.centroid));
  if (!(eig.values[1] > kRankTolerance * eig.values[2]))
    throw std::invalid_argument("fit_plane: points are collinear or coincident");
  fit.normal = upward(eig.vectors[0]);
  double ss = 0.0;
  for (const Point3& p : points) {
    const double d = dot(p - fit.centroid, fit.normal);
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(points.size()));
  return fit;
}

/// Dip direction and dip of the plane with upward unit normal `n`,
/// for a frame with x = east, y = north, z = up.
///
///   dip direction = 0            if n_x = 0 and n_y >= 0
///                 = 180          if n_x = 0 and n_y < 0
///                 = 90  - atan(n_y / n_x)   if n_x > 0
///                 = 270 - atan(n_y / n_x)   if n_x < 0
///   dip           = 0            if n_x^2 + n_y^2 = 0
///                 = 90 - atan(|n_z| / sqrt(n_x^2 + n_y^2))   otherwise
inline DipAngles normal_to_dip(const Vec3& n) {
  if (std::abs(norm(n) - 1.0) > 1e-9) throw std::invalid_argument("normal_to_dip: normal is not unit length");
  if (n.z < 0.0) throw std::invalid_argument("normal_to_dip: normal must point upward (n_z >= 0)");
  DipAngles out;
  if (n.x == 0.0) out.dip_direction = n.y >= 0.0 ? 0.0 : 180.0;
  else if (n.x > 0.0) out.dip_direction = 90.0 - rad2deg(std::atan(n.y / n.x));
  else out.dip_direction = 270.0 - rad2deg(std::atan(n.y / n.x));
  if (out.dip_direction >= 360.0) out.dip_direction -= 360.0;

  const double h2 = n.x * n.x + n.y * n.y;
  out.dip = h2 == 0.0 ? 0.0 : 90.0 - rad2deg(std::atan(std::abs(n.z) / std::sqrt(h2)));
  return out;
}

/// Upward unit normal of a plane with the given dip direction and dip (degrees).
inline Vec3 dip_to_normal(double dip_direction, double dip) {
  const double dd = deg2rad(dip_direction);
  const double d = deg2rad(dip);
  return {std::sin(d) * std::sin(dd), std::sin(d) * std::cos(dd), std::cos(d)};
}

/// Pole of the plane and its lower-hemisphere equal-area (Schmidt) projection
/// onto a net of radius `net_radius`.
inline Pole pole_and_project(double dip_direction, double dip, double net_radius = 1.0) {
  if (!(dip_direction >= 0.0 && dip_direction < 360.0))
    throw std::invalid_argument("pole_and_project: dip direction outside [0, 360)");
  if (!(dip >= 0.0 && dip <= 90.0)) throw std::invalid_argument("pole_and_project: dip outside [0, 90]");
  if (!(net_radius > 0.0) || !std::isfinite(net_radius))
    throw std::invalid_argument("pole_and_project: net radius must be positive");
  Pole p;
  p.trend = std::fmod(dip_direction + 180.0, 360.0);
  p.plunge = 90.0 - dip;
  const double r = net_radius * std::sqrt(2.0) * std::sin(deg2rad((90.0 - p.plunge) / 2.0));
  p.px = r * std::sin(deg2rad(p.trend));
  p.py = r * std::cos(deg2rad(p.trend));
  return p;
}

struct RegionSummary {
  std::vector<FractureRegion> regions;
  std::size_t degenerate_count = 0;
  std::vector<int> skipped_ids;
};

/// Fits and orients each region. Region ids are input positions; regions
/// that cannot be fitted are skipped and counted.
inline RegionSummary summarize_regions(const PointCloud& cloud,
                                       std::span<const std::vector<PointIndex>> fractures,
                                       double net_radius = 1.0) {
  RegionSummary out;
  std::vector<Point3> pts;
  for (std::size_t id = 0; id < fractures.size(); ++id) {
    const auto& idx = fractures[id];
    pts.clear();
    for (PointIndex i : idx) pts.push_back(cloud.points.at(i));
    PlaneFit fit;
    try {
      fit = fit_plane(pts);
    } catch (const std::invalid_argument&) {
      ++out.degenerate_count;
      out.skipped_ids.push_back(static_cast<int>(id));
      continue;
    }
    FractureRegion r;
    r.id = static_cast<int>(id);
    r.point_indices = idx;
    r.centroid = fit.centroid;
    r.plane_normal = fit.normal;
    r.rms_plane_distance = fit.rms;
    const DipAngles da = normal_to_dip(fit.normal);
    r.dip_direction = da.dip_direction;
    r.dip = da.dip;
    r.pole = pole_and_project(da.dip_direction, da.dip, net_radius);
    out.regions.push_back(std::move(r));
  }
  return out;
}

}  // namespace fracseg
