#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracseg/features.hpp"
#include "fracseg/scenes.hpp"
#include "oracles.hpp"

using namespace fracseg;

namespace {

PointCloud grid_plane(int n, double spacing, double noise, std::uint64_t seed, Point3 viewpoint) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  PointCloud c;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) c.points.push_back({i * spacing, j * spacing, noise > 0 ? g(rng) : 0.0});
  c.viewpoint = viewpoint;
  return c;
}

}  // namespace

TEST(LocalFeatures, CoplanarUpwardViewpoint) {
  const PointCloud c = grid_plane(6, 0.01, 0.0, 1, {0, 0, 10});  // 36 points
  const NeighborIndex idx(c);
  const auto f = compute_local_features(c, idx, 30);
  for (const auto& lf : f) {
    ASSERT_FALSE(lf.degenerate);
    EXPECT_NEAR(lf.normal.z, 1.0, 1e-12);
    EXPECT_LT(lf.curvature, 1e-12);
  }
}

TEST(LocalFeatures, CoplanarDownwardViewpointFlips) {
  const PointCloud c = grid_plane(6, 0.01, 0.0, 1, {0, 0, -10});
  const NeighborIndex idx(c);
  for (const auto& lf : compute_local_features(c, idx, 30)) EXPECT_NEAR(lf.normal.z, -1.0, 1e-12);
}

TEST(LocalFeatures, CubeCornersAreIsotropic) {
  std::vector<Point3> corners;
  for (int x : {-1, 1})
    for (int y : {-1, 1})
      for (int z : {-1, 1}) corners.push_back({double(x), double(y), double(z)});
  const LocalFeatures f = features_from_neighborhood(corners, corners[0], Point3{5, 5, 5});
  EXPECT_FALSE(f.degenerate);
  EXPECT_NEAR(f.curvature, 1.0 / 3.0, 1e-12);
}

TEST(LocalFeatures, CollinearNeighborhoodIsDegenerate) {
  std::vector<Point3> line;
  for (int i = 0; i < 10; ++i) line.push_back({0.1 * i, 0.2 * i, 0.0});
  const LocalFeatures f = features_from_neighborhood(line, line[0], Point3{0, 0, 1});
  EXPECT_TRUE(f.degenerate);
  EXPECT_DOUBLE_EQ(f.curvature, 1.0 / 3.0);
  EXPECT_EQ(f.normal, (Vec3{0, 0, 1}));

  std::vector<Point3> same(5, Point3{1, 1, 1});
  EXPECT_TRUE(features_from_neighborhood(same, same[0], Point3{}).degenerate);
}

TEST(LocalFeatures, PerpendicularViewpointKeepsCanonicalSign) {
  // Viewpoint in the plane itself: v0 . (vp - pq) == 0, so +v0 (canonical) is kept.
  const PointCloud c = grid_plane(6, 0.01, 0.0, 1, {0.5, 0.5, 0.0});
  const NeighborIndex idx(c);
  for (const auto& lf : compute_local_features(c, idx, 10)) EXPECT_NEAR(lf.normal.z, 1.0, 1e-12);
}

TEST(LocalFeatures, PreconditionErrors) {
  const PointCloud c = grid_plane(3, 0.01, 0.0, 1, {0, 0, 1});  // 9 points
  const NeighborIndex idx(c);
  EXPECT_THROW(compute_local_features(c, idx, 9), std::invalid_argument);
  EXPECT_THROW(compute_local_features(c, idx, 2), std::invalid_argument);
  EXPECT_NO_THROW(compute_local_features(c, idx, 8));
}

// Jittered plane: every point checked against a direct long-double
// covariance + Jacobi evaluation of the same neighborhood.
TEST(LocalFeatures, NoisyPlaneMatchesCovarianceOracle) {
  const PointCloud c = grid_plane(40, 0.01, 0.001, 77, {0.2, 0.2, 10});
  const NeighborIndex idx(c);
  const auto f = compute_local_features(c, idx, 30);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto nn = oracle::brute_force_knn(c.points, i, 30);
    std::vector<Vec3> hood{c.points[i]};
    for (const auto& n : nn) hood.push_back(c.points[n.index]);
    const auto o = oracle::planarity(hood);
    ASSERT_FALSE(f[i].degenerate);
    EXPECT_NEAR(f[i].curvature, o.sigma, 1e-9);
    EXPECT_NEAR(std::abs(dot(f[i].normal, o.normal)), 1.0, 1e-9);
    EXPECT_GE(dot(f[i].normal, c.viewpoint - c.points[i]), 0.0);
    EXPECT_LT(f[i].curvature, 0.02);
    EXPECT_LT(angle_deg(f[i].normal, Vec3{0, 0, 1}), 5.0);
  }
}

TEST(LocalFeatures, ThreadCountDoesNotChangeOutput) {
  const PointCloud c = scenes::cylinder_patch(0.5, 90.0, 0.4, 0.01, 0.0005, 3);
  const NeighborIndex idx(c);
  const auto one = compute_local_features(c, idx, 30, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const auto many = compute_local_features(c, idx, 30, t);
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      ASSERT_EQ(one[i].normal, many[i].normal);
      ASSERT_EQ(one[i].curvature, many[i].curvature);
      ASSERT_EQ(one[i].degenerate, many[i].degenerate);
    }
  }
}

TEST(LocalFeatures, RigidMotionEquivariance) {
  PointCloud c = scenes::cylinder_patch(0.5, 90.0, 0.3, 0.01, 0.0005, 9);
  c.viewpoint = {0.1, -0.2, 3.0};
  const NeighborIndex idx(c);
  const auto base = compute_local_features(c, idx, 30);

  std::mt19937_64 rng(12);
  const auto rot = oracle::random_rotation(rng);
  const Vec3 shift{12.5, -3.25, 7.0};
  PointCloud moved;
  for (const auto& p : c.points) moved.points.push_back(oracle::apply(rot, p) + shift);
  moved.viewpoint = oracle::apply(rot, c.viewpoint) + shift;
  const NeighborIndex idx2(moved);
  const auto after = compute_local_features(moved, idx2, 30);
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_FALSE(base[i].degenerate);
    EXPECT_NEAR(after[i].curvature, base[i].curvature, 1e-9);
    EXPECT_LT(norm(after[i].normal - oracle::apply(rot, base[i].normal)), 1e-9);
  }
}

TEST(LocalFeatures, ScaleInvariantCurvature) {
  PointCloud c = scenes::cylinder_patch(0.5, 90.0, 0.3, 0.01, 0.0005, 9);
  const NeighborIndex idx(c);
  const auto base = compute_local_features(c, idx, 20);
  PointCloud scaled = c;
  for (auto& p : scaled.points) p *= 7.5;
  scaled.viewpoint *= 7.5;
  const NeighborIndex idx2(scaled);
  const auto after = compute_local_features(scaled, idx2, 20);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(after[i].curvature, base[i].curvature, 1e-9);
}
