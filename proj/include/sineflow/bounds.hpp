#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sineflow/curves.hpp"
#include "sineflow/error.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

struct IntervalFamily {
  std::vector<std::pair<double, double>> intervals;
  double L = 1.0;

  void validate() const;
};

/// Number of closed intervals containing x.
int multiplicity(const IntervalFamily& fam, double x);

struct IntervalSumBound {
  int M = 0;
  double total = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// M is the maximum multiplicity over the endpoint partition of [0, L] (the
/// endpoints themselves and one interior point of every cell).
IntervalSumBound interval_sum_bound(const IntervalFamily& fam);

/// Sub-polyline that is monotone in both x and y. sx, sy are the directions
/// of travel (+1, -1, or 0 when the piece is flat in that coordinate).
struct MonotonePiece {
  std::vector<Point2> points;
  int sx = 0, sy = 0;
  Point2 start() const { return points.front(); }
  Point2 end() const { return points.back(); }
  double length() const;
};

/// Clips p to the square of half-width eps around center and splits each
/// component at strict local extrema of x or y. Flat runs stay with the
/// preceding piece.
std::vector<MonotonePiece> monotone_decomposition(const Polyline& p, double eps, Point2 center = {0.0, 0.0});
std::vector<MonotonePiece> monotone_decomposition(std::span<const Polyline> clipped);

/// A horizontal or vertical line meets the curve more than M times.
class HypothesisViolationError : public Error {
 public:
  HypothesisViolationError(LineSpec witness, int count, int M);
  const LineSpec& witness() const noexcept { return witness_; }
  int count() const noexcept { return count_; }

 private:
  LineSpec witness_;
  int count_;
};

struct GridBound {
  double length = 0.0;
  double bound = 0.0;
  bool holds = false;
  int measured_M = 0;
  std::size_t pieces = 0;
  double projection_sum = 0.0;  // sum over pieces of |dx| + |dy|
  IntervalSumBound x_projections, y_projections;
};

/// Length of p inside the square (-eps, eps)^2 around center against 4 M eps.
/// The crossing hypothesis is measured first; a line with more than M
/// crossings raises HypothesisViolationError.
GridBound grid_length_bound(const Polyline& p, double eps, int M, Point2 center = {0.0, 0.0});
GridBound grid_length_bound(std::span<const Polyline> clipped, double eps, int M, Point2 center = {0.0, 0.0});

/// Max crossings of the pieces with horizontal and vertical lines, and a line
/// attaining it.
std::pair<int, LineSpec> measure_grid_crossings(std::span<const Polyline> pieces);

/// Differentiable map with certified bounds d_lo < |Jac|_2 < d_hi.
struct DiffMap {
  std::string name;
  std::function<Point2(Point2)> forward;
  std::function<Point2(Point2)> inverse;
  /// Row-major Jacobian {a, b, c, d} at a point.
  std::function<std::array<double, 4>(Point2)> jacobian;
  double jac_norm_hi = 1.0;
  double jac_norm_lo = 1.0;
};

DiffMap identity_map();

/// A(x, y) = (x tan(theta) - y, y) with d(theta) = 2 max{tan, 1/tan}.
DiffMap build_shear(double theta);
double shear_d(double theta);

/// f(x, y) = (x, y - u(x, t)) on the window [x_lo, x_hi], certified with d = 2.
class WindowTooWideError : public Error {
 public:
  explicit WindowTooWideError(double sup_slope);
  double sup_slope() const noexcept { return sup_slope_; }

 private:
  double sup_slope_;
};
DiffMap build_flatten(const GrimReaperSpec& reaper, double t, double x_lo, double x_hi, double alpha);

/// Largest singular value of a 2x2 matrix.
double operator_norm(const std::array<double, 4>& m);

struct TransformedBound {
  double length = 0.0;
  double bound = 0.0;  // 4 M d^2 eps
  bool holds = false;
  double image_length = 0.0;
  double image_bound = 0.0;  // 4 M d eps
  bool image_in_ball = false;
  int measured_M = 0;
};

/// Pieces must lie in the closed ball B_eps(center). The image is measured
/// against horizontal and vertical lines in the square of half-width d eps
/// around f(center).
TransformedBound transformed_length_bound(std::span<const Polyline> pieces, const DiffMap& map, double eps, int M,
                                          Point2 center = {0.0, 0.0});
TransformedBound transformed_length_bound(const Polyline& p, const DiffMap& map, double eps, int M,
                                          Point2 center = {0.0, 0.0});

/// Case 1 (x off V): two lines through x avoiding V, angle theta <= pi/4
/// maximized subject to dist(lines, V) >= 2 eps. C counts crossings of T with
/// lines parallel to either one and meeting B_eps(x).
struct Case1Setup {
  Point2 x;
  double eps = 0.0;
  double phi1 = 0.0, phi2 = 0.0;  // line directions
  double theta = 0.0;
  double d = 0.0;
  double line_distance = 0.0;  // dist(l1 u l2, V)
  int C = 0;
  double bound = 0.0;        // 4 C d^2 eps
  double bound_intbound = 0.0;  // 4 (2C) d^2 eps
};
Case1Setup case1_recipe(const Polyline& T, Point2 x, double eps);

/// Case 2 (x on V): c = 6 / t0, eps from |u'| < alpha on [-eps, eps], C from
/// reaper crossings over lambda in [0, 6], omega from vertical lines.
struct Case2Setup {
  double t0 = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  int C = 0;
  int omega = 0;
  double bound = 0.0;           // 4 max{C, omega} eps
  double bound_jacobian = 0.0;  // 4 max{C, omega} d^2 eps with d = 2
};
Case2Setup case2_recipe(const ApproxFamily& fam, double t0, double alpha, int lambda_samples = 13);

/// Crossings of the sampled reaper u^lambda(., t) with a curve.
int reaper_crossings(const Polyline& curve, const GrimReaperSpec& reaper, double t);

struct LocalLengthRow {
  int n = 0;
  double length = 0.0;
  double running_sup = 0.0;
  int measured_M = 0;  // grid crossings of the clipped curve
  bool holds = true;
  bool excluded = false;
  std::string note;
};

struct LocalLengthTable {
  Point2 x;
  double t = 0.0;
  double eps = 0.0;
  int which_case = 0;  // 1 or 2
  double bound = 0.0;
  double sup = 0.0;
  bool holds = true;
  std::vector<LocalLengthRow> rows;
  nlohmann::json setup;
};

struct ExperimentOptions {
  double mesh_h = 0.01;
  FlowParams flow;
  double alpha = 0.1;  // Case 2 slope bound
  // Case 2 only: accept eps above the recipe window, keeping the recipe's C
  // and omega in the bound.
  bool allow_wide_window = false;
};

/// Evolves each inner curve of the family to t and measures its length in B_eps(x).
LocalLengthTable local_length_experiment(const ApproxFamily& fam, Point2 x, double t, double eps,
                                         const ExperimentOptions& opt = {});

/// Same measurement on curves that are already evolved; rows are numbered
/// from first_n. `bound` is reported as given.
LocalLengthTable local_length_table(std::span<const FlowOutcome> evolved, int first_n, Point2 x, double t, double eps,
                                    double bound);

bool on_V(Point2 x);

nlohmann::json to_json(const IntervalSumBound& b);
nlohmann::json to_json(const GridBound& b);
nlohmann::json to_json(const TransformedBound& b);
nlohmann::json to_json(const Case1Setup& s);
nlohmann::json to_json(const Case2Setup& s);
nlohmann::json to_json(const LocalLengthTable& t);
/// Columns n, length, bound, holds.
std::string to_csv(const LocalLengthTable& t);

}  // namespace sineflow
