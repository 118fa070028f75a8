#include "sineflow/segment_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sineflow/error.hpp"

namespace sineflow {

namespace {

constexpr std::uint32_t kLeafSize = 8;

double box_distance(const Box& b, Point2 q) {
  const double dx = std::max({b.lo.x - q.x, 0.0, q.x - b.hi.x});
  const double dy = std::max({b.lo.y - q.y, 0.0, q.y - b.hi.y});
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

SegmentIndex::SegmentIndex(const Polyline& p) {
  const std::size_t m = p.edge_count();
  a_.reserve(m);
  b_.reserve(m);
  for (std::size_t e = 0; e < m; ++e) {
    a_.push_back(p.edge_start(e));
    b_.push_back(p.edge_end(e));
  }
  order_.resize(m);
  std::iota(order_.begin(), order_.end(), 0u);
  if (m == 0) return;
  nodes_.reserve(2 * (m / kLeafSize + 1) + 1);
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(m));
}

void SegmentIndex::build(std::uint32_t node, std::uint32_t first, std::uint32_t count) {
  Box box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
          {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (std::uint32_t k = first; k < first + count; ++k) {
    const auto e = order_[k];
    box.lo.x = std::min({box.lo.x, a_[e].x, b_[e].x});
    box.lo.y = std::min({box.lo.y, a_[e].y, b_[e].y});
    box.hi.x = std::max({box.hi.x, a_[e].x, b_[e].x});
    box.hi.y = std::max({box.hi.y, a_[e].y, b_[e].y});
  }
  nodes_[node].box = box;
  if (count <= kLeafSize) {
    nodes_[node].first = first;
    nodes_[node].count = count;
    return;
  }
  const bool split_x = (box.hi.x - box.lo.x) >= (box.hi.y - box.lo.y);
  const std::uint32_t mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](std::uint32_t l, std::uint32_t r) {
                     return split_x ? (a_[l].x + b_[l].x) < (a_[r].x + b_[r].x)
                                    : (a_[l].y + b_[l].y) < (a_[r].y + b_[r].y);
                   });
  const auto left = static_cast<std::uint32_t>(nodes_.size());
  nodes_[node].left = left;
  nodes_.emplace_back();
  nodes_.emplace_back();
  build(left, first, mid - first);
  build(left + 1, mid, first + count - mid);
}

SegmentIndex::Nearest SegmentIndex::nearest(Point2 q, const std::function<bool(std::size_t)>& skip,
                                            double good_enough) const {
  Nearest best;
  if (nodes_.empty()) return best;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance(n.box, q) >= best.distance) continue;
    if (n.count > 0) {
      for (std::uint32_t k = 0; k < n.count; ++k) {
        const auto e = order_[n.first + k];
        if (skip && skip(e)) continue;
        const double d = point_segment_distance(q, a_[e], b_[e]);
        if (d < best.distance) best = {d, e};
      }
      if (best.distance <= good_enough) return best;
    } else {
      const double dl = box_distance(nodes_[n.left].box, q);
      const double dr = box_distance(nodes_[n.left + 1].box, q);
      // Visit the closer child first.
      if (dl <= dr) {
        stack.push_back(n.left + 1);
        stack.push_back(n.left);
      } else {
        stack.push_back(n.left);
        stack.push_back(n.left + 1);
      }
    }
  }
  return best;
}

}  // namespace sineflow

namespace sineflow {

RegionIndex::RegionIndex(const Polyline& p) : segments_(p) {
  if (!p.closed()) fail(ErrorKind::InvalidInput, "containment needs a closed polyline");
  const std::size_t m = p.edge_count();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : p.vertices()) {
    lo = std::min(lo, v.y);
    hi = std::max(hi, v.y);
  }
  const std::size_t k = std::max<std::size_t>(1, m / 4);
  y0_ = lo;
  inv_h_ = hi > lo ? static_cast<double>(k) / (hi - lo) : 0.0;
  auto slab = [&](double y) {
    const auto s = static_cast<long>((y - y0_) * inv_h_);
    return static_cast<std::size_t>(std::clamp<long>(s, 0, static_cast<long>(k) - 1));
  };
  std::vector<std::uint32_t> count(k + 1, 0);
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t sa = slab(p.edge_start(e).y), sb = slab(p.edge_end(e).y);
    const std::size_t s0 = std::min(sa, sb), s1 = std::max(sa, sb);
    for (std::size_t s = s0; s <= s1; ++s) ++count[s + 1];
  }
  for (std::size_t s = 0; s < k; ++s) count[s + 1] += count[s];
  offsets_ = count;
  edges_.resize(count[k]);
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t sa = slab(p.edge_start(e).y), sb = slab(p.edge_end(e).y);
    const std::size_t s0 = std::min(sa, sb), s1 = std::max(sa, sb);
    for (std::size_t s = s0; s <= s1; ++s) edges_[count[s]++] = static_cast<std::uint32_t>(e);
  }
}

Containment RegionIndex::locate(Point2 q) const {
  if (segments_.nearest(q, {}, kTauGeo).distance <= kTauGeo) return Containment::OnBoundary;
  const long k = static_cast<long>(offsets_.size()) - 1;
  const long s = static_cast<long>((q.y - y0_) * inv_h_);
  if (s < 0 || s >= k) {
    // Outside the vertical extent, except for the top boundary value.
    if (s != k) return Containment::Outside;
  }
  const auto slab = static_cast<std::size_t>(std::min(s, k - 1));
  bool inside = false;
  for (std::uint32_t i = offsets_[slab]; i < offsets_[slab + 1]; ++i) {
    const Point2 a = segments_.edge_start(edges_[i]), b = segments_.edge_end(edges_[i]);
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > q.x) inside = !inside;
    }
  }
  return inside ? Containment::Inside : Containment::Outside;
}

}  // namespace sineflow
