#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fracseg/synth.hpp"

// Ready-made synthetic scenes shared by the CLI, tests and benchmarks.

namespace fracseg::scenes {

/// Two disjoint 1 m x 1 m planes (10,201 points each) with 1 mm noise.
inline std::vector<PlaneSpec> two_plane_specs() {
  PlaneSpec a;
  a.dip_direction = 135.0;
  a.dip = 60.0;
  a.center = {-1.5, 0.0, 0.0};
  a.noise_sigma = 0.001;
  a.label = 0;
  PlaneSpec b;
  b.dip_direction = 250.0;
  b.dip = 35.0;
  b.center = {1.5, 0.0, 0.0};
  b.noise_sigma = 0.001;
  b.label = 1;
  return {a, b};
}

/// Two planes meeting at a horizontal crease along y with a 90 degree angle
/// between their normals (a roof ridge).
inline std::vector<PlaneSpec> dihedral_specs(double size = 1.0, double spacing = 0.01, double noise = 0.001) {
  const double h = 0.5 * size;
  const double c = std::cos(std::numbers::pi / 4.0);
  PlaneSpec east;
  east.dip_direction = 90.0;
  east.dip = 45.0;
  east.center = {h * c, 0.0, -h * c};
  east.width = size;
  east.height = size;
  east.spacing = spacing;
  east.noise_sigma = noise;
  east.label = 0;
  PlaneSpec west = east;
  west.dip_direction = 270.0;
  west.center = {-h * c, 0.0, -h * c};
  west.label = 1;
  return {east, west};
}

/// `count` disjoint planes on a grid of cells `cell` meters apart, with
/// random orientation (dip in [dip_lo, dip_hi]) and random extents in
/// [extent_lo, extent_hi].
inline std::vector<PlaneSpec> random_plane_specs(std::size_t count, std::uint64_t seed, double dip_lo = 10.0,
                                                 double dip_hi = 85.0, double extent_lo = 0.75,
                                                 double extent_hi = 1.0, double spacing = 0.01,
                                                 double noise = 0.001, double cell = 3.0) {
  PortableRng rng(seed);
  std::vector<PlaneSpec> specs;
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  for (std::size_t i = 0; i < count; ++i) {
    PlaneSpec s;
    s.dip_direction = rng.uniform(0.0, 360.0);
    s.dip = rng.uniform(dip_lo, dip_hi);
    s.width = rng.uniform(extent_lo, extent_hi);
    s.height = rng.uniform(extent_lo, extent_hi);
    s.center = {cell * static_cast<double>(i % cols), cell * static_cast<double>(i / cols), 0.0};
    s.spacing = spacing;
    s.noise_sigma = noise;
    s.label = static_cast<int>(i);
    specs.push_back(s);
  }
  return specs;
}

/// A surface z = f(x, y) sampled on a grid, with noise along z.
template <typename Height>
PointCloud sample_height_field(double x_extent, double y_extent, double spacing, double noise,
                               std::uint64_t seed, Height&& height) {
  PortableRng rng(seed);
  PointCloud cloud;
  const std::size_t nx = grid_count(x_extent, spacing);
  const std::size_t ny = grid_count(y_extent, spacing);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = static_cast<double>(i) * spacing - 0.5 * x_extent;
      const double y = static_cast<double>(j) * spacing - 0.5 * y_extent;
      double z = height(x, y);
      if (noise > 0.0) z += noise * rng.gaussian();
      cloud.points.push_back({x, y, z});
    }
  }
  cloud.viewpoint = {0.0, 0.0, 10.0 * std::max(x_extent, y_extent)};
  return cloud;
}

/// Section of a horizontal cylinder (axis along y), convex side up, sampled
/// at roughly uniform arc spacing.
inline PointCloud cylinder_patch(double radius, double arc_deg, double length, double spacing, double noise,
                                 std::uint64_t seed) {
  PortableRng rng(seed);
  PointCloud cloud;
  const double arc = deg2rad(arc_deg) * radius;
  const std::size_t na = grid_count(arc, spacing);
  const std::size_t nl = grid_count(length, spacing);
  for (std::size_t j = 0; j < nl; ++j) {
    for (std::size_t i = 0; i < na; ++i) {
      const double phi = (static_cast<double>(i) * spacing - 0.5 * arc) / radius;
      const double r = radius + (noise > 0.0 ? noise * rng.gaussian() : 0.0);
      cloud.points.push_back({r * std::sin(phi), static_cast<double>(j) * spacing - 0.5 * length,
                              r * std::cos(phi) - radius});
    }
  }
  cloud.viewpoint = {0.0, 0.0, 10.0 * std::max(arc, length)};
  return cloud;
}

/// Fixed curved scene used for threshold sweeps.
inline PointCloud curved_sweep_scene(std::uint64_t seed = 7) {
  return cylinder_patch(1.0, 120.0, 1.0, 0.01, 0.0005, seed);
}

/// Gently undulating plane z = a sin(2 pi x / wavelength).
inline PointCloud undulating_scene(std::uint64_t seed = 11, double amplitude = 0.05, double wavelength = 1.0) {
  return sample_height_field(2.0, 1.0, 0.01, 0.0005, seed, [=](double x, double) {
    return amplitude * std::sin(2.0 * std::numbers::pi * x / wavelength);
  });
}

/// `count` points uniformly distributed on the unit sphere, viewed from the center.
inline PointCloud unit_sphere(std::size_t count, std::uint64_t seed) {
  PortableRng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(count);
  while (cloud.points.size() < count) {
    const Vec3 g{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double n = norm(g);
    if (n < 1e-12) continue;
    cloud.points.push_back(g * (1.0 / n));
  }
  cloud.viewpoint = {0.0, 0.0, 0.0};
  return cloud;
}

/// Faceted outcrop with roughly `target_points` samples at `spacing`: a row
/// of planar facets with cycling orientations, each near 10,000 points.
/// The total matches the target to within grid quantization (well under 1%).
inline std::vector<PlaneSpec> facet_specs(std::size_t target_points, double spacing = 0.01, double noise = 0.001) {
  if (target_points == 0) throw std::invalid_argument("facet_specs: target must be positive");
  const std::size_t facets = std::max<std::size_t>(1, (target_points + 5000) / 10000);
  constexpr double kDipDirections[] = {90.0, 135.0, 180.0, 225.0, 270.0, 315.0, 0.0, 45.0};
  constexpr double kDips[] = {35.0, 50.0, 65.0, 80.0, 45.0, 70.0};
  std::vector<PlaneSpec> specs;
  std::size_t remaining = target_points;
  for (std::size_t f = 0; f < facets; ++f) {
    const std::size_t share = remaining / (facets - f);
    remaining -= share;
    const auto cols = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(share)))));
    const auto rows = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(static_cast<double>(share) / static_cast<double>(cols))));
    PlaneSpec s;
    s.dip_direction = kDipDirections[f % 8];
    s.dip = kDips[f % 6];
    s.width = static_cast<double>(cols - 1) * spacing;
    s.height = static_cast<double>(rows - 1) * spacing;
    s.spacing = spacing;
    s.noise_sigma = noise;
    s.center = {static_cast<double>(f % 16) * 2.0, static_cast<double>(f / 16) * 2.0, 0.0};
    s.label = static_cast<int>(f);
    specs.push_back(s);
  }
  return specs;
}

}  // namespace fracseg::scenes
