#include "sineflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sineflow/error.hpp"
#include "sineflow/segment_index.hpp"

namespace sineflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::EmbeddednessViolation: return "embeddedness-violation";
    case ErrorKind::ResolutionError: return "resolution-error";
    case ErrorKind::ConstructionError: return "construction-error";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::EmptyCurve: return "empty-curve";
    case ErrorKind::OutOfHypothesis: return "out-of-hypothesis";
    case ErrorKind::Extinct: return "extinct";
    case ErrorKind::HypothesisViolation: return "hypothesis-violation";
    case ErrorKind::WindowTooWide: return "window-too-wide";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::StepRejected: return "step-rejected";
  }
  return "unknown";
}

Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return a;
  const double s = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return a + s * d;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) { return distance(p, closest_point_on_segment(p, a, b)); }

namespace {

int orientation_sign(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

std::optional<Point2> segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + t * r;
}

Polyline::Polyline(std::vector<Point2> vertices, bool closed) : vertices_(std::move(vertices)), closed_(closed) {
  if (vertices_.size() < 2) fail(ErrorKind::InvalidInput, "polyline needs at least 2 vertices");
  if (closed_ && vertices_.size() < 3) fail(ErrorKind::InvalidInput, "closed polyline needs at least 3 vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!is_finite(vertices_[i])) fail(ErrorKind::InvalidInput, "non-finite vertex " + std::to_string(i));
  }
  for (std::size_t e = 0; e < edge_count(); ++e) {
    if (edge_start(e) == edge_end(e)) fail(ErrorKind::InvalidInput, "zero-length edge " + std::to_string(e));
  }
}

Polyline make_polyline_dedup(std::vector<Point2> pts, bool closed, double tol) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& q : pts) {
    if (!out.empty() && distance(out.back(), q) <= tol) continue;
    out.push_back(q);
  }
  if (closed) {
    while (out.size() > 1 && distance(out.back(), out.front()) <= tol) out.pop_back();
  }
  return Polyline(std::move(out), closed);
}

Ball::Ball(Point2 c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !is_finite(c)) fail(ErrorKind::InvalidInput, "ball radius must be positive");
}

LineSpec::LineSpec(Point2 b, Vec2 d) : base(b), direction(d) {
  const double n = norm(d);
  if (!(n > 0.0) || !is_finite(b)) fail(ErrorKind::InvalidInput, "line direction must be nonzero");
  direction = d / n;
}

double polyline_length(const Polyline& p) {
  double total = 0.0;
  for (std::size_t e = 0; e < p.edge_count(); ++e) total += distance(p.edge_start(e), p.edge_end(e));
  return total;
}

double signed_area(const Polyline& p) {
  if (!p.closed()) fail(ErrorKind::InvalidInput, "area of an open polyline");
  // Shift to the first vertex to limit cancellation.
  const Point2 o = p[0];
  double twice = 0.0;
  for (std::size_t e = 0; e < p.edge_count(); ++e) twice += cross(p.edge_start(e) - o, p.edge_end(e) - o);
  return 0.5 * twice;
}

double enclosed_area(const Polyline& p) {
  if (!p.closed()) fail(ErrorKind::InvalidInput, "area of an open polyline");
  if (auto hit = find_self_intersection(p))
    fail(ErrorKind::EmbeddednessViolation,
         "edges " + std::to_string(hit->first) + " and " + std::to_string(hit->second) + " intersect");
  return std::abs(signed_area(p));
}

double directed_hausdorff(const Polyline& a, const Polyline& b, double tol) {
  const SegmentIndex index(b);
  auto eval = [&](Point2 q) { return index.nearest(q); };
  // Upper bound for the distance along [p, q]: the distance to one fixed
  // edge is convex along a line, so it is bounded by its endpoint values.
  auto edge_bound = [&](std::size_t e, Point2 p, Point2 q) {
    return std::max(point_segment_distance(p, index.edge_start(e), index.edge_end(e)),
                    point_segment_distance(q, index.edge_start(e), index.edge_end(e)));
  };

  double best = 0.0;
  std::vector<SegmentIndex::Nearest> at_vertex(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    at_vertex[i] = eval(a[i]);
    best = std::max(best, at_vertex[i].distance);
  }

  struct Piece {
    Point2 p, q;
    SegmentIndex::Nearest np, nq;
  };
  std::vector<Piece> stack;
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    const std::size_t j = (e + 1) % a.size();
    stack.push_back({a[e], a[j], at_vertex[e], at_vertex[j]});
    while (!stack.empty()) {
      Piece s = stack.back();
      stack.pop_back();
      const double len = distance(s.p, s.q);
      double upper = 0.5 * (s.np.distance + s.nq.distance + len);
      upper = std::min({upper, edge_bound(s.np.edge, s.p, s.q), edge_bound(s.nq.edge, s.p, s.q)});
      if (upper <= best + tol) continue;
      const Point2 m = 0.5 * (s.p + s.q);
      const auto nm = eval(m);
      best = std::max(best, nm.distance);
      stack.push_back({s.p, m, s.np, nm});
      stack.push_back({m, s.q, nm, s.nq});
    }
  }
  return best;
}

double hausdorff_distance(const Polyline& a, const Polyline& b, double tol) {
  return std::max(directed_hausdorff(a, b, tol), directed_hausdorff(b, a, tol));
}

namespace {

struct ClipInterval {
  double s0, s1;
  bool valid;
};

// Parameter interval of [a, b] inside the closed ball.
ClipInterval clip_segment_ball(Point2 a, Point2 b, const Ball& ball) {
  const Vec2 d = b - a;
  const Vec2 f = a - ball.center;
  const double qa = dot(d, d);
  const double qb = 2.0 * dot(d, f);
  const double qc = dot(f, f) - ball.radius * ball.radius;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return {0, 0, false};
  const double root = std::sqrt(disc);
  // Chord length of the supporting line inside the ball; tangent lines touch
  // in a single point and contribute nothing.
  if (root / std::sqrt(qa) <= kTauGeo) return {0, 0, false};
  double s0 = (-qb - root) / (2.0 * qa);
  double s1 = (-qb + root) / (2.0 * qa);
  s0 = std::max(s0, 0.0);
  s1 = std::min(s1, 1.0);
  if (s1 <= s0) return {0, 0, false};
  return {s0, s1, true};
}

ClipInterval clip_segment_box(Point2 a, Point2 b, const Box& box) {
  double s0 = 0.0, s1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return {0, 0, false};
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) s0 = std::max(s0, r);
    else s1 = std::min(s1, r);
  }
  if (s1 <= s0) return {0, 0, false};
  return {s0, s1, true};
}

template <typename Clip>
std::vector<Polyline> restrict_with(const Polyline& p, Clip&& clip) {
  std::vector<std::vector<Point2>> runs;
  bool open_run = false;
  bool first_starts_at_origin = false;
  bool all_inside = true;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const ClipInterval c = clip(a, b);
    if (!c.valid) {
      open_run = false;
      all_inside = false;
      continue;
    }
    const Point2 s = a + c.s0 * (b - a);
    const Point2 t = a + c.s1 * (b - a);
    if (c.s0 > 0.0 || c.s1 < 1.0) all_inside = false;
    if (open_run && c.s0 == 0.0) {
      runs.back().push_back(t);
    } else {
      if (e == 0 && c.s0 == 0.0) first_starts_at_origin = true;
      runs.push_back({s, t});
    }
    open_run = (c.s1 == 1.0);
  }
  if (p.closed() && all_inside) return {p};
  // A closed curve whose last run reaches vertex 0 continues into the first run.
  if (p.closed() && runs.size() > 1 && open_run && first_starts_at_origin) {
    auto& last = runs.back();
    last.insert(last.end(), runs.front().begin() + 1, runs.front().end());
    runs.erase(runs.begin());
  }
  std::vector<Polyline> out;
  for (auto& r : runs) {
    std::vector<Point2> pts;
    for (const auto& q : r) {
      if (pts.empty() || !(pts.back() == q)) pts.push_back(q);
    }
    if (pts.size() >= 2) out.emplace_back(std::move(pts), false);
  }
  return out;
}

}  // namespace

std::vector<Polyline> restrict_to_ball(const Polyline& p, const Ball& b) {
  return restrict_with(p, [&](Point2 s, Point2 t) { return clip_segment_ball(s, t, b); });
}

std::vector<Polyline> restrict_to_box(const Polyline& p, const Box& box) {
  return restrict_with(p, [&](Point2 s, Point2 t) { return clip_segment_box(s, t, box); });
}

double turning_angle(Point2 prev, Point2 cur, Point2 next) {
  const Vec2 u = cur - prev;
  const Vec2 w = next - cur;
  return std::atan2(cross(u, w), dot(u, w));
}

Polyline resample_by_arclength(const Polyline& p, double h, double corner_angle) {
  const double total = polyline_length(p);
  if (!(h > 0.0) || h >= total) fail(ErrorKind::InvalidInput, "resample spacing must lie in (0, length)");

  const std::size_t n = p.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t e = 0; e < p.edge_count(); ++e) cum[e + 1] = cum[e] + distance(p.edge_start(e), p.edge_end(e));

  std::vector<std::size_t> breaks;
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.closed() && (i == 0 || i + 1 == n)) {
      breaks.push_back(i);
      continue;
    }
    const Point2 prev = p[(i + n - 1) % n], next = p[(i + 1) % n];
    if (std::abs(turning_angle(prev, p[i], next)) > corner_angle) breaks.push_back(i);
  }

  auto point_at = [&](double s) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
    const auto it = std::upper_bound(cum.begin(), cum.begin() + static_cast<std::ptrdiff_t>(p.edge_count()) + 1, s);
    std::size_t e = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cum.begin() - 1));
    e = std::min(e, p.edge_count() - 1);
    const double len = cum[e + 1] - cum[e];
    const double f = len > 0 ? (s - cum[e]) / len : 0.0;
    return p.edge_start(e) + f * (p.edge_end(e) - p.edge_start(e));
  };

  std::vector<Point2> out;
  auto emit_run = [&](double s_begin, double s_end) {
    const double len = s_end - s_begin;
    const auto segs = std::max<long>(1, std::lround(len / h));
    for (long k = 0; k < segs; ++k) out.push_back(point_at(s_begin + len * static_cast<double>(k) / segs));
  };

  if (p.closed()) {
    if (breaks.empty()) {
      const auto segs = std::max<long>(3, std::lround(total / h));
      for (long k = 0; k < segs; ++k) out.push_back(point_at(total * static_cast<double>(k) / segs));
    } else {
      for (std::size_t k = 0; k < breaks.size(); ++k) {
        const double s0 = cum[breaks[k]];
        double s1 = k + 1 < breaks.size() ? cum[breaks[k + 1]] : cum[breaks[0]] + total;
        emit_run(s0, s1);
      }
    }
    return make_polyline_dedup(std::move(out), true);
  }
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) emit_run(cum[breaks[k]], cum[breaks[k + 1]]);
  out.push_back(p[n - 1]);
  return make_polyline_dedup(std::move(out), false);
}

double distance_to_polyline(const Polyline& p, Point2 q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < p.edge_count(); ++e)
    best = std::min(best, point_segment_distance(q, p.edge_start(e), p.edge_end(e)));
  return best;
}

Containment point_in_region(const Polyline& p, Point2 q) {
  if (!p.closed()) fail(ErrorKind::InvalidInput, "containment needs a closed polyline");
  if (distance_to_polyline(p, q) <= kTauGeo) return Containment::OnBoundary;
  bool inside = false;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > q.x) inside = !inside;
    }
  }
  return inside ? Containment::Inside : Containment::Outside;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const Polyline& p, double tol) {
  const std::size_t m = p.edge_count();
  const std::size_t n = p.size();
  auto adjacent = [&](std::size_t e, std::size_t f) {
    if (e > f) std::swap(e, f);
    return f == e + 1 || (p.closed() && e == 0 && f == m - 1);
  };
  // Adjacent edges only meet improperly when they fold back onto each other.
  for (std::size_t v = 0; v < n; ++v) {
    if (!p.closed() && (v == 0 || v + 1 == n)) continue;
    const Point2 c = p[v];
    const Vec2 u = p[(v + n - 1) % n] - c;
    const Vec2 w = p[(v + 1) % n] - c;
    if (dot(u, w) > 0.0 && std::abs(cross(u, w)) <= tol * std::max(norm(u), norm(w)))
      return std::make_pair((v + m - 1) % m, v % m);
  }
  const SegmentIndex index(p);
  for (std::size_t e = 0; e < m; ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const Box box{{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    index.for_each_overlapping(box, tol, [&](std::size_t f) {
      if (hit || f <= e || adjacent(e, f)) return;
      if (segment_segment_distance(a, b, index.edge_start(f), index.edge_end(f)) <= tol) hit = std::make_pair(e, f);
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

double polyline_distance(const Polyline& a, const Polyline& b) {
  const SegmentIndex ib(b);
  const SegmentIndex ia(a);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : a.vertices()) best = std::min(best, ib.nearest_distance(v));
  for (const auto& v : b.vertices()) best = std::min(best, ia.nearest_distance(v));
  for (std::size_t e = 0; e < a.edge_count() && best > 0.0; ++e) {
    const Point2 s = a.edge_start(e), t = a.edge_end(e);
    const Box box{{std::min(s.x, t.x), std::min(s.y, t.y)}, {std::max(s.x, t.x), std::max(s.y, t.y)}};
    ib.for_each_overlapping(box, 0.0, [&](std::size_t f) {
      if (segments_cross(s, t, ib.edge_start(f), ib.edge_end(f))) best = 0.0;
    });
  }
  return best;
}

}  // namespace sineflow
