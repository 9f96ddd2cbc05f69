#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fracseg/vec3.hpp"

namespace fracseg {

/// Ordered, index-addressable set of points plus the scanner position used to
/// orient normals. Axis convention is x = east, y = north, z = up.
struct PointCloud {
  std::vector<Point3> points;
  Point3 viewpoint{};
  std::string crs_note = "x=east,y=north,z=up";

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const Point3& operator[](std::size_t i) const { return points[i]; }
};

}  // namespace fracseg
