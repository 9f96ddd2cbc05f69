#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fracseg/orientation.hpp"
#include "fracseg/point_cloud.hpp"
#include "fracseg/vec3.hpp"

namespace fracseg {

/// Reproducible random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard. Uniforms use the top 53 bits of each
/// draw; Gaussians use the Box-Muller transform (cosine branch first, then the
/// cached sine branch). No standard distribution objects are involved, so a
/// given seed produces the same stream on every conforming platform.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class NoiseMode { along_normal, isotropic };

/// One rectangular planar patch sampled on a regular grid.
struct PlaneSpec {
  double dip_direction = 0.0;  // degrees
  double dip = 0.0;            // degrees
  Point3 center{};
  double width = 1.0;   // along strike, meters
  double height = 1.0;  // along dip, meters
  double spacing = 0.01;
  double noise_sigma = 0.0;
  int label = 0;
};

/// Grid samples per side for an extent; width 1 at spacing 0.01 gives 101.
inline std::size_t grid_count(double extent, double spacing) {
  return static_cast<std::size_t>(std::floor(extent / spacing + 0.5)) + 1;
}

/// Horizontal unit vector along strike (dip direction minus 90 degrees).
inline Vec3 strike_vector(double dip_direction) {
  const double dd = deg2rad(dip_direction);
  return {-std::cos(dd), std::sin(dd), 0.0};
}

/// Unit vector pointing down the dip.
inline Vec3 down_dip_vector(double dip_direction, double dip) {
  const double dd = deg2rad(dip_direction);
  const double d = deg2rad(dip);
  return {std::sin(dd) * std::cos(d), std::cos(dd) * std::cos(d), -std::sin(d)};
}

struct SyntheticScene {
  PointCloud cloud;
  std::vector<int> labels;           // per point
  std::map<int, Vec3> truth_normals;  // upward normal per label
};

/// Places the viewpoint on the side of the mean upward normal, ten times the
/// largest extent away from the centroid of the samples.
inline Point3 place_viewpoint(std::span<const Point3> points, const Vec3& mean_normal, double max_extent) {
  Vec3 centroid{};
  for (const Point3& p : points) centroid += p;
  if (!points.empty()) centroid *= 1.0 / static_cast<double>(points.size());
  Vec3 dir = normalized(mean_normal);
  if (norm(dir) == 0.0) dir = {0.0, 0.0, 1.0};
  return centroid + dir * (10.0 * max_extent);
}

inline void validate(const PlaneSpec& s) {
  if (!(s.spacing > 0.0)) throw std::invalid_argument("PlaneSpec: spacing must be positive");
  if (!(s.width > 0.0 && s.height > 0.0)) throw std::invalid_argument("PlaneSpec: extent must be positive");
  if (!(s.dip >= 0.0 && s.dip <= 90.0)) throw std::invalid_argument("PlaneSpec: dip outside [0, 90]");
  if (!(s.dip_direction >= 0.0 && s.dip_direction < 360.0))
    throw std::invalid_argument("PlaneSpec: dip direction outside [0, 360)");
  if (!(s.noise_sigma >= 0.0)) throw std::invalid_argument("PlaneSpec: noise must be non-negative");
}

/// Samples every plane on its grid and jitters each sample. Planes are
/// emitted in input order, each row-major along strike then down dip.
inline SyntheticScene generate_synthetic(std::span<const PlaneSpec> specs, std::uint64_t seed,
                                         NoiseMode noise = NoiseMode::along_normal) {
  if (specs.empty()) throw std::invalid_argument("generate_synthetic: no plane specs");
  PortableRng rng(seed);
  SyntheticScene scene;
  Vec3 normal_sum{};
  double max_extent = 0.0;
  for (const PlaneSpec& s : specs) {
    validate(s);
    const Vec3 n = dip_to_normal(s.dip_direction, s.dip);
    const Vec3 along = strike_vector(s.dip_direction);
    const Vec3 down = down_dip_vector(s.dip_direction, s.dip);
    const std::size_t nu = grid_count(s.width, s.spacing);
    const std::size_t nv = grid_count(s.height, s.spacing);
    const double u0 = -0.5 * static_cast<double>(nu - 1) * s.spacing;
    const double v0 = -0.5 * static_cast<double>(nv - 1) * s.spacing;
    for (std::size_t j = 0; j < nv; ++j) {
      for (std::size_t i = 0; i < nu; ++i) {
        Point3 p = s.center + along * (u0 + static_cast<double>(i) * s.spacing) +
                   down * (v0 + static_cast<double>(j) * s.spacing);
        if (s.noise_sigma > 0.0) {
          if (noise == NoiseMode::along_normal) {
            p += n * (s.noise_sigma * rng.gaussian());
          } else {
            const double gx = rng.gaussian();
            const double gy = rng.gaussian();
            const double gz = rng.gaussian();
            p += Vec3{gx, gy, gz} * s.noise_sigma;
          }
        }
        scene.cloud.points.push_back(p);
        scene.labels.push_back(s.label);
      }
    }
    scene.truth_normals[s.label] = n;
    normal_sum += n;
    max_extent = std::max({max_extent, s.width, s.height});
  }
  scene.cloud.viewpoint = place_viewpoint(scene.cloud.points, normal_sum, max_extent);
  return scene;
}

// ---------------------------------------------------------------------------
// Scoring

struct PlaneScore {
  int truth_label = 0;
  int predicted_id = -1;  // -1 when unmatched
  std::size_t overlap = 0;
  double precision = 0.0;
  double recall = 0.0;
  double orientation_error = 90.0;  // degrees, line angle; 90 when unmatched
};

struct SegmentationScore {
  std::vector<PlaneScore> planes;  // ascending truth label
  double mean_orientation_error = 0.0;  // over matched planes
  std::size_t detected_count = 0;       // distinct predicted ids >= 0
};

/// Matches truth planes to predicted fractures one-to-one, greedily by
/// overlap (larger first, then lower predicted id, then lower truth label).
/// Negative labels on either side are background. Orientation error is the
/// angle between the two planes' normals; a matched prediction without a
/// normal scores 90 degrees.
inline SegmentationScore score_against_truth(std::span<const int> truth, std::span<const int> predicted,
                                             const std::map<int, Vec3>& truth_normals,
                                             const std::map<int, Vec3>& predicted_normals) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("score_against_truth: label sequences differ in length");

  std::map<int, std::size_t> truth_size, pred_size;
  std::map<std::pair<int, int>, std::size_t> overlap;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= 0) ++truth_size[truth[i]];
    if (predicted[i] >= 0) ++pred_size[predicted[i]];
    if (truth[i] >= 0 && predicted[i] >= 0) ++overlap[{truth[i], predicted[i]}];
  }

  std::vector<std::tuple<std::size_t, int, int>> cand;  // overlap, pred, truth
  cand.reserve(overlap.size());
  for (const auto& [key, count] : overlap) cand.emplace_back(count, key.second, key.first);
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  std::map<int, PlaneScore> by_truth;
  for (const auto& [label, size] : truth_size) by_truth[label].truth_label = label;
  std::map<int, bool> pred_used;
  for (const auto& [count, pred, label] : cand) {
    PlaneScore& ps = by_truth[label];
    if (ps.predicted_id >= 0 || pred_used[pred]) continue;
    pred_used[pred] = true;
    ps.predicted_id = pred;
    ps.overlap = count;
    ps.precision = static_cast<double>(count) / static_cast<double>(pred_size[pred]);
    ps.recall = static_cast<double>(count) / static_cast<double>(truth_size[label]);
    const auto tn = truth_normals.find(label);
    const auto pn = predicted_normals.find(pred);
    if (tn != truth_normals.end() && pn != predicted_normals.end()) {
      const double c = std::min(1.0, std::abs(dot(normalized(tn->second), normalized(pn->second))));
      ps.orientation_error = rad2deg(std::acos(c));
    }
  }

  SegmentationScore out;
  out.detected_count = pred_size.size();
  double err_sum = 0.0;
  std::size_t matched = 0;
  for (auto& [label, ps] : by_truth) {
    if (ps.predicted_id >= 0) {
      err_sum += ps.orientation_error;
      ++matched;
    }
    out.planes.push_back(ps);
  }
  out.mean_orientation_error = matched ? err_sum / static_cast<double>(matched) : 0.0;
  return out;
}

}  // namespace fracseg
