#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fracseg/kdtree.hpp"
#include "fracseg/point_cloud.hpp"
#include "fracseg/sym_eigen.hpp"

namespace fracseg {

/// Per-point surface normal (oriented toward the scanner) and surface
/// variation lambda0 / (lambda0 + lambda1 + lambda2), which lies in [0, 1/3].
struct LocalFeatures {
  Vec3 normal{0.0, 0.0, 1.0};
  double curvature = 1.0 / 3.0;
  bool degenerate = true;
};

inline constexpr double kDegenerateEigenSum = 1e-18;  // m^2

/// Features of one query point given its neighborhood samples (which should
/// include the query itself).
template <typename Range>
LocalFeatures features_from_neighborhood(const Range& neighborhood, const Point3& query,
                                         const Point3& viewpoint) {
  const EigenDecomp eig = eig_sym3(covariance_of(neighborhood));
  const double l0 = std::max(eig.values[0], 0.0);
  const double l1 = std::max(eig.values[1], 0.0);
  const double l2 = std::max(eig.values[2], 0.0);
  const double sum = l0 + l1 + l2;

  LocalFeatures f;
  if (sum < kDegenerateEigenSum || l1 <= kRankTolerance * l2) return f;

  f.degenerate = false;
  f.curvature = l0 / sum;
  const Vec3& v0 = eig.vectors[0];
  f.normal = dot(v0, viewpoint - query) < 0.0 ? -v0 : v0;
  return f;
}

/// Computes features for every point from the query plus its k nearest
/// neighbors. Work is split into contiguous index blocks across `threads`
/// workers; each point's result depends only on the cloud and index, so the
/// output is identical for any thread count.
inline std::vector<LocalFeatures> compute_local_features(const PointCloud& cloud,
                                                         const NeighborIndex& index, std::size_t k,
                                                         unsigned threads = 1) {
  if (k < 3) throw std::invalid_argument("compute_local_features: k must be >= 3");
  if (index.size() != cloud.size())
    throw std::invalid_argument("compute_local_features: index was built over a different cloud");
  if (cloud.size() < k + 1)
    throw std::invalid_argument("compute_local_features: k = " + std::to_string(k) +
                                " exceeds N - 1 = " + std::to_string(cloud.size() - 1));

  std::vector<LocalFeatures> out(cloud.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> nbrs;
    std::vector<Point3> hood;
    hood.reserve(k + 1);
    for (std::size_t i = begin; i < end; ++i) {
      index.knn(i, k, nbrs);
      hood.clear();
      hood.push_back(cloud.points[i]);
      for (const Neighbor& n : nbrs) hood.push_back(cloud.points[n.index]);
      out[i] = features_from_neighborhood(hood, cloud.points[i], cloud.viewpoint);
    }
  };

  const std::size_t n = cloud.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n / 256, 1));
  if (workers == 1) {
    work(0, n);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t begin = n * t / workers;
      const std::size_t end = n * (t + 1) / workers;
      pool.emplace_back(work, begin, end);
    }
  }  // joins
  return out;
}

}  // namespace fracseg
