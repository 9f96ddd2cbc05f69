#pragma once

// Independent reference implementations used only by the tests. They share
// no code path with the library beyond the plain Vec3 type.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fracseg/kdtree.hpp"
#include "fracseg/vec3.hpp"

namespace oracle {

using fracseg::Neighbor;
using fracseg::PointIndex;
using fracseg::Vec3;

/// Linear scan: every other point, sorted by (distance, index), first k.
inline std::vector<Neighbor> brute_force_knn(const std::vector<Vec3>& pts, std::size_t q, std::size_t k) {
  std::vector<Neighbor> all;
  all.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == q) continue;
    const double dx = pts[q].x - pts[i].x;
    const double dy = pts[q].y - pts[i].y;
    const double dz = pts[q].z - pts[i].z;
    all.push_back({static_cast<PointIndex>(i), std::sqrt(dx * dx + dy * dy + dz * dz)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

struct Eigen3 {
  std::array<long double, 3> values;           // ascending
  std::array<std::array<long double, 3>, 3> vectors;  // vectors[i] is unit eigenvector i
};

/// Classical Jacobi in long double: repeatedly annihilates the largest
/// off-diagonal entry using the half-angle atan2 rotation.
inline Eigen3 jacobi(const std::array<std::array<long double, 3>, 3>& input) {
  auto a = input;
  std::array<std::array<long double, 3>, 3> v{};
  for (int i = 0; i < 3; ++i) v[i][i] = 1.0L;
  long double scale = 0;
  for (auto& r : a)
    for (long double x : r) scale = std::max(scale, std::fabs(x));
  for (int iter = 0; iter < 500; ++iter) {
    int p = 0, q = 1;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::fabs(a[i][j]) > std::fabs(a[p][q])) p = i, q = j;
    if (std::fabs(a[p][q]) <= 1e-30L * scale) break;
    const long double angle = 0.5L * std::atan2(2.0L * a[p][q], a[q][q] - a[p][p]);
    const long double c = std::cos(angle), s = std::sin(angle);
    // Rotation G with G_pp = c, G_pq = s, G_qp = -s, G_qq = c; A <- G^T A G.
    for (int k = 0; k < 3; ++k) {
      const long double akp = a[k][p], akq = a[k][q];
      a[k][p] = c * akp - s * akq;
      a[k][q] = s * akp + c * akq;
    }
    for (int k = 0; k < 3; ++k) {
      const long double apk = a[p][k], aqk = a[q][k];
      a[p][k] = c * apk - s * aqk;
      a[q][k] = s * apk + c * aqk;
    }
    for (int k = 0; k < 3; ++k) {
      const long double vkp = v[k][p], vkq = v[k][q];
      v[k][p] = c * vkp - s * vkq;
      v[k][q] = s * vkp + c * vkq;
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int l, int r) { return a[l][l] < a[r][r]; });
  Eigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[order[i]][order[i]];
    for (int k = 0; k < 3; ++k) out.vectors[i][k] = v[k][order[i]];
  }
  return out;
}

/// Covariance about the mean in long double, 1/n normalization.
inline std::array<std::array<long double, 3>, 3> covariance(const std::vector<Vec3>& pts) {
  long double m[3] = {0, 0, 0};
  for (const Vec3& p : pts) {
    m[0] += p.x;
    m[1] += p.y;
    m[2] += p.z;
  }
  for (auto& x : m) x /= static_cast<long double>(pts.size());
  std::array<std::array<long double, 3>, 3> c{};
  for (const Vec3& p : pts) {
    const long double d[3] = {p.x - m[0], p.y - m[1], p.z - m[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] += d[i] * d[j];
  }
  for (auto& r : c)
    for (auto& x : r) x /= static_cast<long double>(pts.size());
  return c;
}

/// Smallest-eigenvalue direction and surface variation of a neighborhood.
struct PlanarityOracle {
  Vec3 normal;  // unoriented
  double sigma;
};

inline PlanarityOracle planarity(const std::vector<Vec3>& pts) {
  const Eigen3 e = jacobi(covariance(pts));
  const long double sum = std::max(e.values[0], 0.0L) + e.values[1] + e.values[2];
  return {Vec3{static_cast<double>(e.vectors[0][0]), static_cast<double>(e.vectors[0][1]),
               static_cast<double>(e.vectors[0][2])},
          static_cast<double>(std::max(e.values[0], 0.0L) / sum)};
}

/// Uniformly random rotation matrix (rows) from a random unit quaternion.
inline std::array<Vec3, 3> random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double q[4];
  double n = 0;
  for (double& x : q) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  for (double& x : q) x /= n;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {Vec3{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
          Vec3{2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
          Vec3{2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
}

inline Vec3 apply(const std::array<Vec3, 3>& r, const Vec3& v) {
  return {fracseg::dot(r[0], v), fracseg::dot(r[1], v), fracseg::dot(r[2], v)};
}

}  // namespace oracle
