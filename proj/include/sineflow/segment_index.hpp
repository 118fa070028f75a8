#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "sineflow/geometry.hpp"

namespace sineflow {

/// Static bounding-volume hierarchy over the edges of a polyline. Used for
/// nearest-edge distance queries and overlapping-box enumeration.
class SegmentIndex {
 public:
  explicit SegmentIndex(const Polyline& p);

  struct Nearest {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t edge = 0;
  };

  /// Nearest edge to q, skipping edges for which skip(e) returns true. Stops
  /// descending once below `good_enough`.
  Nearest nearest(Point2 q, const std::function<bool(std::size_t)>& skip = {}, double good_enough = 0.0) const;

  double nearest_distance(Point2 q) const { return nearest(q).distance; }

  /// Calls fn(edge) for every edge whose bounding box meets box (inflated by pad).
  template <typename Fn>
  void for_each_overlapping(const Box& box, double pad, Fn&& fn) const {
    if (nodes_.empty()) return;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
      const Node& n = nodes_[stack.back()];
      stack.pop_back();
      if (n.box.lo.x > box.hi.x + pad || n.box.hi.x < box.lo.x - pad || n.box.lo.y > box.hi.y + pad ||
          n.box.hi.y < box.lo.y - pad)
        continue;
      if (n.count > 0) {
        for (std::uint32_t k = 0; k < n.count; ++k) fn(static_cast<std::size_t>(order_[n.first + k]));
      } else {
        stack.push_back(n.left);
        stack.push_back(n.left + 1);
      }
    }
  }

  std::size_t edge_count() const noexcept { return order_.size(); }
  Point2 edge_start(std::size_t e) const { return a_[e]; }
  Point2 edge_end(std::size_t e) const { return b_[e]; }

 private:
  struct Node {
    Box box;
    std::uint32_t left = 0;   // first child index (children are adjacent)
    std::uint32_t first = 0;  // leaf: first slot in order_
    std::uint32_t count = 0;  // leaf: number of edges; 0 for inner nodes
  };

  void build(std::uint32_t node, std::uint32_t first, std::uint32_t count);

  std::vector<Point2> a_;
  std::vector<Point2> b_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Repeated containment queries against one closed polyline: edges are
/// bucketed into horizontal slabs so each even-odd test scans one slab.
class RegionIndex {
 public:
  explicit RegionIndex(const Polyline& p);
  Containment locate(Point2 q) const;

 private:
  SegmentIndex segments_;
  double y0_ = 0.0, inv_h_ = 0.0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> edges_;
};

}  // namespace sineflow
