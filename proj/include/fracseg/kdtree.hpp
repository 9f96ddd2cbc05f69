#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracseg/point_cloud.hpp"
#include "fracseg/vec3.hpp"

namespace fracseg {

using PointIndex = std::uint32_t;

struct Neighbor {
  PointIndex index;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Strict ordering used everywhere neighbors are ranked: distance, then index.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

/// Exact k-nearest-neighbor search over a fixed point set (k-d tree with
/// per-node bounding boxes). Immutable after construction, so concurrent
/// queries from several threads are safe.
///
/// Results exclude the query point itself and are sorted by
/// (distance, index). Pruning is conservative in floating point: a subtree
/// is skipped only when the rounded box distance is strictly larger than the
/// current k-th distance, so the output equals a linear scan bit for bit.
class NeighborIndex {
 public:
  explicit NeighborIndex(std::span<const Point3> points, std::size_t leaf_size = 16)
      : leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (points.empty()) throw std::invalid_argument("cannot build neighbor index over an empty cloud");
    if (points.size() > std::numeric_limits<PointIndex>::max())
      throw std::invalid_argument("cloud too large for 32-bit point indices");
    original_.assign(points.begin(), points.end());
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), PointIndex{0});
    nodes_.reserve(2 * points.size() / leaf_size_ + 1);
    build(0, order_.size());
    sorted_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) sorted_[i] = original_[order_[i]];
  }

  explicit NeighborIndex(const PointCloud& cloud, std::size_t leaf_size = 16)
      : NeighborIndex(std::span<const Point3>(cloud.points), leaf_size) {}

  std::size_t size() const noexcept { return original_.size(); }

  const Point3& point(std::size_t i) const { return original_.at(i); }

  /// Up to min(k, N-1) nearest neighbors of point `query_index`, excluding itself.
  std::vector<Neighbor> knn(std::size_t query_index, std::size_t k) const {
    std::vector<Neighbor> out;
    knn(query_index, k, out);
    return out;
  }

  /// Buffer-reusing variant; `out` is cleared first.
  void knn(std::size_t query_index, std::size_t k, std::vector<Neighbor>& out) const {
    if (k == 0) throw std::invalid_argument("knn: k must be >= 1");
    if (query_index >= original_.size())
      throw std::out_of_range("knn: query index " + std::to_string(query_index) + " out of range");
    out.clear();
    const std::size_t want = std::min(k, original_.size() - 1);
    if (want == 0) return;
    out.reserve(want + 1);
    Search s{original_[query_index], static_cast<PointIndex>(query_index), want, out};
    search(0, s);
    std::sort_heap(out.begin(), out.end(), neighbor_less);
  }

 private:
  struct Node {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::uint32_t begin;
    std::uint32_t end;
    std::uint32_t left = 0;  // 0 marks a leaf; the root is never a child
    std::uint32_t right = 0;
  };

  struct Search {
    Point3 q;
    PointIndex self;
    std::size_t k;
    std::vector<Neighbor>& heap;  // max-heap under neighbor_less
  };

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Node node{};
    node.begin = static_cast<std::uint32_t>(begin);
    node.end = static_cast<std::uint32_t>(end);
    node.lo.fill(std::numeric_limits<double>::infinity());
    node.hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      const Point3& p = original_[order_[i]];
      for (int a = 0; a < 3; ++a) {
        node.lo[a] = std::min(node.lo[a], p[a]);
        node.hi[a] = std::max(node.hi[a], p[a]);
      }
    }
    if (end - begin > leaf_size_) {
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                       order_.begin() + static_cast<std::ptrdiff_t>(mid),
                       order_.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](PointIndex a, PointIndex b) {
                         const double pa = original_[a][axis];
                         const double pb = original_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                       });
      node.left = build(begin, mid);
      node.right = build(mid, end);
    }
    nodes_[id] = node;
    return id;
  }

  // Lower bound on the rounded distance from q to any point inside the box.
  static double box_distance(const Node& n, const Point3& q) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      double d = 0.0;
      if (q[a] < n.lo[a]) d = q[a] - n.lo[a];
      else if (q[a] > n.hi[a]) d = q[a] - n.hi[a];
      d2 += d * d;
    }
    return std::sqrt(d2);
  }

  bool can_skip(const Node& n, const Search& s) const {
    return s.heap.size() == s.k && box_distance(n, s.q) > s.heap.front().distance;
  }

  void search(std::uint32_t node_id, Search& s) const {
    const Node& n = nodes_[node_id];
    if (n.left == 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const PointIndex idx = order_[i];
        if (idx == s.self) continue;
        const Neighbor cand{idx, std::sqrt(squared_distance(s.q, sorted_[i]))};
        if (s.heap.size() < s.k) {
          s.heap.push_back(cand);
          std::push_heap(s.heap.begin(), s.heap.end(), neighbor_less);
        } else if (neighbor_less(cand, s.heap.front())) {
          std::pop_heap(s.heap.begin(), s.heap.end(), neighbor_less);
          s.heap.back() = cand;
          std::push_heap(s.heap.begin(), s.heap.end(), neighbor_less);
        }
      }
      return;
    }
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    const bool left_first = box_distance(l, s.q) <= box_distance(r, s.q);
    const std::uint32_t first = left_first ? n.left : n.right;
    const std::uint32_t second = left_first ? n.right : n.left;
    if (!can_skip(nodes_[first], s)) search(first, s);
    if (!can_skip(nodes_[second], s)) search(second, s);
  }

  std::size_t leaf_size_;
  std::vector<Point3> original_;
  std::vector<PointIndex> order_;
  std::vector<Point3> sorted_;
  std::vector<Node> nodes_;
};

}  // namespace fracseg
