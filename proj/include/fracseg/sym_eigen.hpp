#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>

#include "fracseg/vec3.hpp"

namespace fracseg {

/// Relative eigenvalue floor below which a point set counts as lacking a dimension.
inline constexpr double kRankTolerance = 1e-12;

/// Symmetric 3x3 matrix stored as its six unique entries.
struct SymMat3 {
  double xx = 0.0, xy = 0.0, xz = 0.0;
  double yy = 0.0, yz = 0.0;
  double zz = 0.0;

  double operator()(int r, int c) const {
    if (r > c) std::swap(r, c);
    if (r == 0) return c == 0 ? xx : (c == 1 ? xy : xz);
    if (r == 1) return c == 1 ? yy : yz;
    return zz;
  }

  Vec3 operator*(const Vec3& v) const {
    return {xx * v.x + xy * v.y + xz * v.z,
            xy * v.x + yy * v.y + yz * v.z,
            xz * v.x + yz * v.y + zz * v.z};
  }

  double quadratic_form(const Vec3& a, const Vec3& b) const { return dot(a, (*this) * b); }

  double trace() const { return xx + yy + zz; }

  bool finite() const {
    return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(xz) && std::isfinite(yy) &&
           std::isfinite(yz) && std::isfinite(zz);
  }

  double max_abs() const {
    return std::max({std::abs(xx), std::abs(xy), std::abs(xz), std::abs(yy), std::abs(yz),
                     std::abs(zz)});
  }
};

/// Eigenvalues ascending; `vectors[i]` belongs to `values[i]`.
struct EigenDecomp {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
};

/// Covariance (1/n normalization) of a point set about its centroid.
/// `centroid` receives the mean when non-null.
template <typename Range>
SymMat3 covariance_of(const Range& points, Vec3* centroid = nullptr) {
  Vec3 mean{};
  std::size_t n = 0;
  for (const Vec3& p : points) {
    mean += p;
    ++n;
  }
  SymMat3 c{};
  if (n == 0) return c;
  mean *= 1.0 / static_cast<double>(n);
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    c.xx += d.x * d.x;
    c.xy += d.x * d.y;
    c.xz += d.x * d.z;
    c.yy += d.y * d.y;
    c.yz += d.y * d.z;
    c.zz += d.z * d.z;
  }
  const double inv = 1.0 / static_cast<double>(n);
  c.xx *= inv;
  c.xy *= inv;
  c.xz *= inv;
  c.yy *= inv;
  c.yz *= inv;
  c.zz *= inv;
  if (centroid) *centroid = mean;
  return c;
}

namespace detail {

// Flip so the largest-magnitude component is positive (first one wins ties).
inline Vec3 canonical_sign(Vec3 v) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return v[best] < 0.0 ? -v : v;
}

// Cyclic Jacobi sweeps; used when the closed form is ill-conditioned.
inline EigenDecomp jacobi_eigen(const SymMat3& m) {
  double a[3][3];
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[r][c] = m(r, c);

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<std::pair<double, Vec3>, 3> pairs;
  for (int i = 0; i < 3; ++i) pairs[i] = {a[i][i], Vec3{v[0][i], v[1][i], v[2][i]}};
  std::sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  EigenDecomp out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = pairs[i].first;
    out.vectors[i] = normalized(pairs[i].second);
  }
  return out;
}

// Unit vector u with u . v = 0, for unit v.
inline Vec3 any_orthogonal(const Vec3& v) {
  if (std::abs(v.x) > std::abs(v.y)) return Vec3{-v.z, 0.0, v.x} * (1.0 / std::hypot(v.x, v.z));
  return Vec3{0.0, v.z, -v.y} * (1.0 / std::hypot(v.y, v.z));
}

// Null vector of (m - lambda I) from the best-conditioned row cross product.
// Returns false when every cross product vanishes.
inline bool null_vector(const SymMat3& m, double lambda, Vec3& out) {
  const Vec3 r0{m.xx - lambda, m.xy, m.xz};
  const Vec3 r1{m.xy, m.yy - lambda, m.yz};
  const Vec3 r2{m.xz, m.yz, m.zz - lambda};
  const std::array<Vec3, 3> c{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  int best = 0;
  double best_n = dot(c[0], c[0]);
  for (int i = 1; i < 3; ++i) {
    const double n = dot(c[i], c[i]);
    if (n > best_n) {
      best_n = n;
      best = i;
    }
  }
  if (!(best_n > 0.0)) return false;
  out = c[best] * (1.0 / std::sqrt(best_n));
  return true;
}

}  // namespace detail

/// Eigen-decomposition of a symmetric 3x3 matrix.
///
/// Eigenvalues come from the trigonometric solution of the characteristic
/// cubic. The eigenvector of the most isolated eigenvalue is taken from a row
/// cross product of (A - lambda I); the remaining pair is resolved by an exact
/// 2x2 rotation in its orthogonal complement, which keeps the triple
/// orthonormal even when two eigenvalues coincide. When all three eigenvalues
/// agree to 1e-12 relative, cyclic Jacobi takes over.
///
/// Each eigenvector is sign-canonical: its largest-magnitude component is
/// positive, the first such component on ties.
inline EigenDecomp eig_sym3(const SymMat3& input) {
  if (!input.finite()) throw std::invalid_argument("eig_sym3: non-finite matrix entry");

  const double scale = input.max_abs();
  EigenDecomp out;
  if (scale == 0.0) {
    out.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    return out;
  }
  const double inv = 1.0 / scale;
  const SymMat3 m{input.xx * inv, input.xy * inv, input.xz * inv,
                  input.yy * inv, input.yz * inv, input.zz * inv};

  const double mean = m.trace() / 3.0;
  const double kxx = m.xx - mean, kyy = m.yy - mean, kzz = m.zz - mean;
  const double p = (kxx * kxx + kyy * kyy + kzz * kzz +
                    2.0 * (m.xy * m.xy + m.xz * m.xz + m.yz * m.yz)) / 6.0;
  const double sp = std::sqrt(p);

  auto finish = [&](EigenDecomp d) {
    for (int i = 0; i < 3; ++i) {
      d.values[i] *= scale;
      d.vectors[i] = detail::canonical_sign(d.vectors[i]);
    }
    return d;
  };

  if (sp < 1e-12) return finish(detail::jacobi_eigen(m));

  const double det = kxx * (kyy * kzz - m.yz * m.yz) - m.xy * (m.xy * kzz - m.yz * m.xz) +
                     m.xz * (m.xy * m.yz - kyy * m.xz);
  const double q = det / 2.0;
  const double phi = std::atan2(std::sqrt(std::max(p * p * p - q * q, 0.0)), q) / 3.0;
  double l2 = mean + 2.0 * sp * std::cos(phi);
  double l0 = mean + 2.0 * sp * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  double l1 = 3.0 * mean - l0 - l2;
  if (l1 < l0) std::swap(l0, l1);
  if (l2 < l1) std::swap(l1, l2);
  if (l1 < l0) std::swap(l0, l1);

  const bool low_isolated = (l1 - l0) >= (l2 - l1);
  Vec3 iso;
  if (!detail::null_vector(m, low_isolated ? l0 : l2, iso)) return finish(detail::jacobi_eigen(m));

  const Vec3 u = detail::any_orthogonal(iso);
  const Vec3 w = cross(iso, u);
  const double a = m.quadratic_form(u, u);
  const double b = m.quadratic_form(u, w);
  const double c = m.quadratic_form(w, w);
  double ea = a, ec = c;
  Vec3 va = u, vc = w;
  if (b != 0.0) {
    const double tau = (c - a) / (2.0 * b);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double cs = 1.0 / std::sqrt(1.0 + t * t);
    const double sn = t * cs;
    ea = a - t * b;
    ec = c + t * b;
    va = u * cs - w * sn;
    vc = u * sn + w * cs;
  }

  std::array<std::pair<double, Vec3>, 3> pairs{
      std::pair{m.quadratic_form(iso, iso), iso}, std::pair{ea, va}, std::pair{ec, vc}};
  std::sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  for (int i = 0; i < 3; ++i) {
    out.values[i] = pairs[i].first;
    out.vectors[i] = pairs[i].second;
  }
  return finish(out);
}

}  // namespace fracseg
