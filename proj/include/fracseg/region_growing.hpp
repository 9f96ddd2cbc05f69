#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracseg/features.hpp"
#include "fracseg/kdtree.hpp"
#include "fracseg/point_cloud.hpp"

namespace fracseg {

/// Region-growing thresholds. Angles are in degrees.
struct GrowParams {
  std::size_t k = 30;
  double theta_th = 6.0;   // normal deviation between admitting seed and candidate
  double t_th = 20.0;      // deviation from the initial seed normal for seed promotion
  std::size_t min_region_size = 100;

  /// Throws std::invalid_argument unless 0 < angle < 90 (or <= 180 when relaxed).
  void validate(bool relaxed = false) const {
    const double upper = relaxed ? 180.0 : 90.0;
    auto check = [&](double v, const char* name) {
      const bool ok = v > 0.0 && (relaxed ? v <= upper : v < upper);
      if (!ok)
        throw std::invalid_argument(std::string(name) + " = " + std::to_string(v) +
                                    " outside (0, " + std::to_string(static_cast<int>(upper)) + ")");
    };
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (min_region_size == 0) throw std::invalid_argument("min_region_size must be >= 1");
    check(theta_th, "theta_th");
    check(t_th, "t_th");
  }
};

struct Region {
  std::vector<PointIndex> points;  // admission order; points.front() == seed
  PointIndex seed = 0;             // minimum-curvature initial seed
  Vec3 seed_normal{};
};

/// One admission event, recorded when tracing is enabled.
struct Admission {
  std::size_t step = 0;
  std::size_t region = 0;
  PointIndex point = 0;
  PointIndex admitted_by = 0;  // the initial seed admits itself
  double angle_to_seed = 0.0;
  double angle_to_initial = 0.0;
  bool promoted = false;
};

struct Segmentation {
  std::vector<Region> regions;           // creation order
  std::vector<PointIndex> unassigned;    // degenerate points, ascending
  std::size_t point_count = 0;
  std::vector<Admission> trace;          // empty unless requested
};

struct GrowOptions {
  bool record_trace = false;
  bool relaxed_thresholds = false;  // allow thresholds up to 180 degrees
};

/// True when regions and `unassigned` together cover 0..point_count-1 exactly once.
inline bool is_partition(const Segmentation& seg) {
  std::vector<char> seen(seg.point_count, 0);
  auto mark = [&](PointIndex i) {
    if (i >= seg.point_count || seen[i]) return false;
    seen[i] = 1;
    return true;
  };
  for (const Region& r : seg.regions)
    for (PointIndex i : r.points)
      if (!mark(i)) return false;
  for (PointIndex i : seg.unassigned)
    if (!mark(i)) return false;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

/// Minimum-curvature seeded region growing.
///
/// Remaining points are consumed in (curvature, index) order; each untaken
/// point starts a region. Seeds are processed FIFO. A neighbor joins when its
/// normal is within theta_th of the admitting seed's normal, and becomes a
/// seed itself when it is also within t_th of the region's initial normal.
/// Neighbors come from the same k-NN relation used for the features.
/// Comparisons are strict.
inline Segmentation grow_regions(const PointCloud& cloud, std::span<const LocalFeatures> features,
                                 const NeighborIndex& index, const GrowParams& params,
                                 const GrowOptions& options = {}) {
  params.validate(options.relaxed_thresholds);
  if (features.size() != cloud.size())
    throw std::invalid_argument("grow_regions: " + std::to_string(features.size()) +
                                " features for " + std::to_string(cloud.size()) + " points");
  if (index.size() != cloud.size())
    throw std::invalid_argument("grow_regions: index was built over a different cloud");

  const std::size_t n = cloud.size();
  Segmentation seg;
  seg.point_count = n;

  std::vector<char> available(n, 0);
  std::vector<PointIndex> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].degenerate) {
      seg.unassigned.push_back(static_cast<PointIndex>(i));
    } else {
      available[i] = 1;
      order.push_back(static_cast<PointIndex>(i));
    }
  }
  std::sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) {
    const double ca = features[a].curvature;
    const double cb = features[b].curvature;
    return ca < cb || (ca == cb && a < b);
  });

  std::deque<PointIndex> seeds;
  std::vector<Neighbor> nbrs;
  std::size_t step = 0;
  for (PointIndex start : order) {
    if (!available[start]) continue;
    available[start] = 0;

    Region region;
    region.seed = start;
    region.seed_normal = features[start].normal;
    region.points.push_back(start);
    const std::size_t region_id = seg.regions.size();
    if (options.record_trace) seg.trace.push_back({step++, region_id, start, start, 0.0, 0.0, true});

    seeds.clear();
    seeds.push_back(start);
    while (!seeds.empty()) {
      const PointIndex s = seeds.front();
      seeds.pop_front();
      const Vec3& ns = features[s].normal;
      index.knn(s, params.k, nbrs);
      for (const Neighbor& nb : nbrs) {
        const PointIndex p = nb.index;
        if (!available[p]) continue;
        const Vec3& np = features[p].normal;
        const double to_seed = angle_deg(ns, np);
        if (!(to_seed < params.theta_th)) continue;
        available[p] = 0;
        region.points.push_back(p);
        const double to_initial = angle_deg(region.seed_normal, np);
        const bool promote = to_initial < params.t_th;
        if (promote) seeds.push_back(p);
        if (options.record_trace)
          seg.trace.push_back({step++, region_id, p, s, to_seed, to_initial, promote});
      }
    }
    seg.regions.push_back(std::move(region));
  }

  if (!is_partition(seg)) throw std::logic_error("grow_regions: output is not a partition");
  return seg;
}

/// Regions split by size: fractures are regions with strictly more than the
/// threshold number of points, renumbered 0..F-1 in creation order.
struct Classification {
  std::vector<std::vector<PointIndex>> fractures;
  std::vector<PointIndex> residue;  // ascending
  std::vector<int> labels;          // per point: fracture id or -1
};

inline Classification classify_regions(const Segmentation& seg, std::size_t min_region_size) {
  Classification out;
  out.labels.assign(seg.point_count, -1);
  for (const Region& r : seg.regions) {
    if (r.points.size() > min_region_size) {
      const int id = static_cast<int>(out.fractures.size());
      for (PointIndex i : r.points) out.labels[i] = id;
      out.fractures.push_back(r.points);
    }
  }
  for (std::size_t i = 0; i < out.labels.size(); ++i)
    if (out.labels[i] < 0) out.residue.push_back(static_cast<PointIndex>(i));
  return out;
}

}  // namespace fracseg
