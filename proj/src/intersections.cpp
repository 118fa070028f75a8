#include "sineflow/intersections.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sineflow/error.hpp"
#include "sineflow/segment_index.hpp"

namespace sineflow {

namespace {

constexpr double kMinAngle = 1e-3;

struct Hit {
  Point2 at;
  std::size_t ea, eb;
};

Box edge_box(Point2 p, Point2 q) {
  return {{std::min(p.x, q.x), std::min(p.y, q.y)}, {std::max(p.x, q.x), std::max(p.y, q.y)}};
}

double sin_angle(Vec2 u, Vec2 v) { return std::abs(cross(u, v)) / (norm(u) * norm(v)); }

// Contiguous run of edges touched by a cluster, with circular wrap for closed curves.
std::pair<std::size_t, std::size_t> edge_run(std::vector<std::size_t> edges, std::size_t m, bool closed) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (!closed || edges.size() == 1) return {edges.front(), edges.back()};
  std::size_t best_gap = (edges.front() + m) - edges.back();
  std::size_t start = 0;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    const std::size_t gap = edges[k] - edges[k - 1];
    if (gap > best_gap) {
      best_gap = gap;
      start = k;
    }
  }
  return {edges[start], edges[(start + edges.size() - 1) % edges.size()]};
}

struct LocalShape {
  Point2 apex;
  Vec2 in;   // direction pointing back along the curve
  Vec2 out;  // direction pointing forward
  bool ends = false;
};

// Local picture of curve p around a cluster: apex, backwards and forwards directions.
LocalShape local_shape(const Polyline& p, std::size_t first, std::size_t last, Point2 hit, double r) {
  const std::size_t n = p.size();
  LocalShape s;
  // Nearest vertex inside the cluster becomes the apex, otherwise the hit itself.
  s.apex = hit;
  double best = r;
  for (std::size_t e = first;; e = (e + 1) % p.edge_count()) {
    for (Point2 v : {p.edge_start(e), p.edge_end(e)}) {
      const double d = distance(v, hit);
      if (d <= best) {
        best = d;
        s.apex = v;
      }
    }
    if (e == last) break;
  }
  // Walk outwards until vertices leave the cluster radius.
  std::size_t i = first;
  std::size_t guard = 0;
  Point2 back = p.edge_start(first);
  while (distance(back, s.apex) <= r && guard++ < n) {
    if (!p.closed() && i == 0) {
      s.ends = true;
      break;
    }
    i = (i + n - 1) % n;
    back = p[i];
  }
  std::size_t j = p.closed() ? (last + 1) % n : last + 1;
  guard = 0;
  Point2 fwd = p[j];
  while (distance(fwd, s.apex) <= r && guard++ < n) {
    if (!p.closed() && j + 1 == n) {
      s.ends = true;
      break;
    }
    j = (j + 1) % n;
    fwd = p[j];
  }
  s.in = back - s.apex;
  s.out = fwd - s.apex;
  return s;
}

// Whether direction d at the apex points into the left side of the wedge in -> apex -> out.
int wedge_side(const LocalShape& b, Vec2 d, bool& uncertain) {
  const Vec2 leg1 = -1.0 * b.in;
  const Vec2 leg2 = b.out;
  const double c1 = cross(leg1, d) / (norm(leg1) * norm(d));
  const double c2 = cross(leg2, d) / (norm(leg2) * norm(d));
  if (std::abs(c1) < kMinAngle || std::abs(c2) < kMinAngle) uncertain = true;
  const bool left_turn = cross(leg1, leg2) >= 0.0;
  const bool left = left_turn ? (c1 > 0 && c2 > 0) : (c1 > 0 || c2 > 0);
  return left ? 1 : -1;
}

}  // namespace

CrossingCount count_crossings(const Polyline& a, const Polyline& b, double tau) {
  CrossingCount result;
  const SegmentIndex ib(b);
  std::vector<Hit> hits;
  for (std::size_t ea = 0; ea < a.edge_count(); ++ea) {
    const Point2 p = a.edge_start(ea), q = a.edge_end(ea);
    ib.for_each_overlapping(edge_box(p, q), tau, [&](std::size_t eb) {
      const Point2 c = ib.edge_start(eb), d = ib.edge_end(eb);
      const double dist = segment_segment_distance(p, q, c, d);
      if (dist > tau) return;
      if (sin_angle(q - p, d - c) < 1e-12) {
        // Collinear overlap or parallel contact: tangential.
        result.uncertain = true;
        return;
      }
      if (auto x = segment_intersection(p, q, c, d)) {
        hits.push_back({*x, ea, eb});
        return;
      }
      // Near miss within tau: closest endpoint configuration.
      Point2 best = p;
      double bd = point_segment_distance(p, c, d);
      for (Point2 v : {q}) {
        const double dv = point_segment_distance(v, c, d);
        if (dv < bd) bd = dv, best = v;
      }
      for (Point2 v : {c, d}) {
        const double dv = point_segment_distance(v, p, q);
        if (dv < bd) bd = dv, best = v;
      }
      hits.push_back({best, ea, eb});
    });
  }

  // Endpoints of open curves near the other curve.
  auto endpoint_check = [&](const Polyline& p, const Polyline& other) {
    if (p.closed()) return;
    for (Point2 v : {p.vertices().front(), p.vertices().back()})
      if (distance_to_polyline(other, v) <= tau) result.uncertain = true;
  };
  endpoint_check(a, b);
  endpoint_check(b, a);
  if (hits.empty()) return result;

  // Cluster hits within 10 tau (single linkage via union-find on sorted x).
  const double r = 10.0 * tau;
  std::vector<std::size_t> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> order(hits.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t rr) { return hits[l].at.x < hits[rr].at.x; });
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t l = k + 1; l < order.size() && hits[order[l]].at.x - hits[order[k]].at.x <= r; ++l)
      if (distance(hits[order[k]].at, hits[order[l]].at) <= r) parent[find(order[k])] = find(order[l]);

  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t k = 0; k < hits.size(); ++k) clusters[find(k)].push_back(k);

  for (const auto& [root, members] : clusters) {
    std::vector<std::size_t> ea, eb;
    for (auto k : members) {
      ea.push_back(hits[k].ea);
      eb.push_back(hits[k].eb);
    }
    const Point2 at = hits[members.front()].at;
    const auto [a0, a1] = edge_run(ea, a.edge_count(), a.closed());
    const auto [b0, b1] = edge_run(eb, b.edge_count(), b.closed());
    const LocalShape sa = local_shape(a, a0, a1, at, r);
    const LocalShape sb = local_shape(b, b0, b1, at, r);
    if (sa.ends || sb.ends) {
      result.uncertain = true;
      continue;
    }
    bool unsure = false;
    const int s_in = wedge_side(sb, sa.in, unsure);
    const int s_out = wedge_side(sb, sa.out, unsure);
    if (unsure) result.uncertain = true;
    if (s_in != s_out) {
      ++result.count;
    } else {
      // Touch without crossing.
      result.uncertain = true;
    }
  }
  return result;
}

CrossingCount count_line_crossings(const Polyline& p, const LineSpec& l, double tau) {
  CrossingCount result;
  const std::size_t n = p.size();
  std::vector<int> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = l.signed_distance(p[i]);
    sign[i] = std::abs(s) <= tau ? 0 : (s > 0 ? 1 : -1);
  }
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const std::size_t i = e, j = (e + 1) % n;
    if (sign[i] != 0 && sign[j] != 0 && sign[i] != sign[j]) {
      const Vec2 d = p[j] - p[i];
      if (std::abs(cross(l.direction, d)) / norm(d) < kMinAngle) result.uncertain = true;
    }
  }

  // Sequence of nonzero signs with the lengths of zero runs between them.
  std::size_t start = 0;
  if (p.closed()) {
    while (start < n && sign[start] == 0) ++start;
    if (start == n) {
      result.uncertain = true;
      return result;
    }
  } else {
    if (sign.front() == 0 || sign.back() == 0) result.uncertain = true;
    while (start < n && sign[start] == 0) ++start;
    if (start == n) return result;
  }
  const std::size_t steps = p.closed() ? n : n - start;
  int prev = sign[start];
  std::size_t zeros = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const std::size_t i = (start + k) % n;
    if (!p.closed() && start + k >= n) break;
    if (sign[i] == 0) {
      ++zeros;
      continue;
    }
    if (sign[i] != prev) ++result.count;
    if (zeros > 0) {
      // A vertex on the line: crossing if sides differ, touch otherwise.
      if (sign[i] == prev || zeros > 1) result.uncertain = true;
    }
    zeros = 0;
    prev = sign[i];
  }
  return result;
}

namespace {

AxisSweep sweep(std::span<const Polyline> pieces, bool vertical) {
  auto coord = [vertical](Point2 v) { return vertical ? v.x : v.y; };
  std::vector<double> xs;
  for (const auto& p : pieces)
    for (const auto& v : p.vertices()) xs.push_back(coord(v));
  AxisSweep out;
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const std::size_t k = xs.size();
  auto idx = [&](double c) { return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), c) - xs.begin()); };

  // gap[g] counts edges spanning (xs[g], xs[g+1]); at[g] edges strictly spanning xs[g].
  std::vector<long> gap(k + 1, 0), at(k + 1, 0);
  std::map<std::size_t, long> touch;
  for (const auto& p : pieces) {
    for (std::size_t e = 0; e < p.edge_count(); ++e) {
      std::size_t i0 = idx(coord(p.edge_start(e))), i1 = idx(coord(p.edge_end(e)));
      if (i0 == i1) {
        out.degenerate = true;
        continue;
      }
      if (i0 > i1) std::swap(i0, i1);
      gap[i0] += 1;
      gap[i1] -= 1;
      at[i0 + 1] += 1;
      at[i1] -= 1;
    }
    // Runs of consecutive vertices on a swept line: count once if the curve passes through.
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t prev = p.closed() ? (i + n - 1) % n : i - 1;
      if (i > 0 || p.closed()) {
        if (coord(p[prev]) == coord(p[i])) continue;  // not the start of a run
      }
      std::size_t j = i;
      std::size_t len = 1;
      while (len < n) {
        const std::size_t nx = p.closed() ? (j + 1) % n : j + 1;
        if (nx >= n || coord(p[nx]) != coord(p[i])) break;
        j = nx;
        ++len;
      }
      if (len == n) continue;
      const bool has_prev = p.closed() || i > 0;
      const std::size_t nx = p.closed() ? (j + 1) % n : j + 1;
      const bool has_next = nx < n;
      if (!has_prev || !has_next) continue;
      const double c = coord(p[i]);
      if ((coord(p[prev]) - c) * (coord(p[nx]) - c) < 0) touch[idx(c)] += 1;
    }
  }
  long run_gap = 0, run_at = 0;
  for (std::size_t g = 0; g < k; ++g) {
    run_gap += gap[g];
    run_at += at[g];
    const long here = run_at + (touch.count(g) ? touch[g] : 0);
    if (here > out.max_count) {
      out.max_count = static_cast<int>(here);
      out.at = xs[g];
    }
    if (g + 1 < k && run_gap > out.max_count) {
      out.max_count = static_cast<int>(run_gap);
      out.at = 0.5 * (xs[g] + xs[g + 1]);
    }
  }
  return out;
}

}  // namespace

AxisSweep max_vertical_crossings(std::span<const Polyline> pieces) { return sweep(pieces, true); }
AxisSweep max_horizontal_crossings(std::span<const Polyline> pieces) { return sweep(pieces, false); }

MonitorReport monotonicity_monitor(std::vector<MonitorSample> samples) {
  MonitorReport r;
  r.samples = std::move(samples);
  std::optional<int> ref;
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    if (s.uncertain) continue;
    if (ref && s.count > *ref && k + 1 < r.samples.size()) {
      const auto& nx = r.samples[k + 1];
      if (!nx.uncertain && nx.count > *ref) {
        r.violation = true;
        r.violation_index = k;
        return r;
      }
    }
    ref = ref ? std::min(*ref, s.count) : s.count;
  }
  return r;
}

MonitorReport monotonicity_monitor(std::span<const double> times, const PairProvider& pairs, double tau) {
  if (times.size() < 2) fail(ErrorKind::InvalidInput, "monitor needs at least two times");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) fail(ErrorKind::InvalidInput, "monitor times must increase");
  std::vector<MonitorSample> samples;
  for (double t : times) {
    const auto [a, b] = pairs(t);
    const auto c = count_crossings(a, b, tau);
    samples.push_back({t, c.count, c.uncertain});
  }
  return monotonicity_monitor(std::move(samples));
}

nlohmann::json to_json(const MonitorReport& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : r.samples) arr.push_back({{"t", s.t}, {"count", s.count}, {"uncertain", s.uncertain}});
  return arr;
}

}  // namespace sineflow
