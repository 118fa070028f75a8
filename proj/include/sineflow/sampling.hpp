#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sineflow/geometry.hpp"

namespace sineflow {

/// Appends samples of the parametric curve f on [t0, t1] so that every chord
/// deviates from the curve by less than tol. The start point is appended only
/// when `out` is empty or differs from f(t0); the end point is always
/// appended. Throws ResolutionError when more than budget points are needed.
void sample_adaptive(const std::function<Point2(double)>& f, double t0, double t1, double tol, std::size_t budget,
                     std::vector<Point2>& out);

/// Same, with forced breakpoints (sorted, inside [t0, t1]) so that features
/// between coarse samples cannot be skipped.
void sample_adaptive(const std::function<Point2(double)>& f, std::span<const double> breaks, double tol,
                     std::size_t budget, std::vector<Point2>& out);

/// Point at arclength s from the start of an open chain (clamped).
Point2 point_at_arclength(std::span<const Point2> chain, double s);

/// Drops the first `s` of arclength from the chain, returning the new start.
std::vector<Point2> trim_front(std::span<const Point2> chain, double s);

/// Drops the last `s` of arclength from the chain.
std::vector<Point2> trim_back(std::span<const Point2> chain, double s);

/// Quadratic Bézier samples strictly between a and b with control c.
void append_quadratic(Point2 a, Point2 c, Point2 b, double tol, std::vector<Point2>& out);

}  // namespace sineflow
