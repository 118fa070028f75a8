#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sineflow {

/// Absolute tolerance for incidence decisions, in plane units.
inline constexpr double kTauGeo = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
  constexpr Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Point2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

using Vec2 = Point2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Closest point to p on the closed segment [a, b].
Point2 closest_point_on_segment(Point2 p, Point2 a, Point2 b);

/// Distance between closed segments [a, b] and [c, d]; zero when they cross.
double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d);

/// Intersection point of two segments when they cross at a single point.
std::optional<Point2> segment_intersection(Point2 a, Point2 b, Point2 c, Point2 d);

/// Ordered planar vertex chain, open or closed. Consecutive vertices are
/// distinct (including last-to-first when closed) and all coordinates finite.
class Polyline {
 public:
  Polyline(std::vector<Point2> vertices, bool closed);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  bool closed() const noexcept { return closed_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  std::size_t edge_count() const noexcept { return closed_ ? vertices_.size() : vertices_.size() - 1; }
  Point2 edge_start(std::size_t e) const { return vertices_[e]; }
  Point2 edge_end(std::size_t e) const { return vertices_[(e + 1) % vertices_.size()]; }

 private:
  std::vector<Point2> vertices_;
  bool closed_;
};

/// Builds a polyline after dropping consecutive duplicates (within tol).
Polyline make_polyline_dedup(std::vector<Point2> pts, bool closed, double tol = 0.0);

struct Ball {
  Point2 center;
  double radius;

  Ball(Point2 c, double r);
};

/// Infinite line through base with unit direction.
struct LineSpec {
  Point2 base;
  Vec2 direction;

  LineSpec(Point2 b, Vec2 d);
  static LineSpec vertical(double x) { return {{x, 0.0}, {0.0, 1.0}}; }
  static LineSpec horizontal(double y) { return {{0.0, y}, {1.0, 0.0}}; }
  /// Signed distance, positive to the left of direction.
  double signed_distance(Point2 p) const { return cross(direction, p - base); }
};

/// Axis-aligned box [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point2 lo;
  Point2 hi;

  static Box centered(Point2 c, double half) { return {{c.x - half, c.y - half}, {c.x + half, c.y + half}}; }
  bool contains(Point2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

enum class Containment { Inside, Outside, OnBoundary };

double polyline_length(const Polyline& p);

/// Signed shoelace area, positive for counterclockwise closed curves.
double signed_area(const Polyline& p);

/// Area of the region bounded by a closed embedded polyline.
double enclosed_area(const Polyline& p);

/// Symmetric Hausdorff distance between the traced point sets. The result is
/// within tol of the exact value (branch-and-bound over edges).
double hausdorff_distance(const Polyline& a, const Polyline& b, double tol = 1e-9);

/// Directed part: sup over points of a of the distance to b.
double directed_hausdorff(const Polyline& a, const Polyline& b, double tol = 1e-9);

/// Maximal sub-polylines of p inside the closed ball, clipped at the circle.
std::vector<Polyline> restrict_to_ball(const Polyline& p, const Ball& b);

/// Maximal sub-polylines of p inside the closed box.
std::vector<Polyline> restrict_to_box(const Polyline& p, const Box& box);

/// Uniform arclength resampling with spacing close to h. Vertices whose
/// turning angle exceeds corner_angle are kept as breakpoints.
Polyline resample_by_arclength(const Polyline& p, double h, double corner_angle = 0.5);

/// Even-odd containment; OnBoundary when q is within kTauGeo of the trace.
Containment point_in_region(const Polyline& p, Point2 q);

/// First pair of non-adjacent edges closer than tol, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const Polyline& p,
                                                                         double tol = kTauGeo);

inline bool is_embedded(const Polyline& p, double tol = kTauGeo) { return !find_self_intersection(p, tol); }

/// Minimum distance between the traced point sets.
double polyline_distance(const Polyline& a, const Polyline& b);

/// Distance from q to the trace of p.
double distance_to_polyline(const Polyline& p, Point2 q);

/// Discrete turning angle at vertex i (signed, left turns positive).
double turning_angle(Point2 prev, Point2 cur, Point2 next);

/// Applies f to every vertex.
template <typename F>
Polyline transform(const Polyline& p, F&& f) {
  std::vector<Point2> out;
  out.reserve(p.size());
  for (const auto& v : p.vertices()) out.push_back(f(v));
  return make_polyline_dedup(std::move(out), p.closed());
}

}  // namespace sineflow
