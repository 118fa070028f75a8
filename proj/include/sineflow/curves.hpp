#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "json.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

/// Topologist's sine curve: graph of sin(1/x) on [x_min, beta], a quintic
/// Bézier arc from (0,-1) to (beta, sin(1/beta)), and the segment V.
struct TSCSpec {
  double beta = 1.0;
  std::array<Point2, 6> arc_ctrl{};
  std::size_t n_graph = 4'000'000;
  double x_min = 0.0;
  double chord_tol = 1e-8;

  /// Standard picture with truncation at a_{n_max+2}.
  static TSCSpec standard(int n_max = 8, double beta = 1.0);
  void validate() const;
};

/// Rules for the approximating sequences:
///   delta_n = delta0 * delta_ratio^n
///   a_n     = 2 / ((4 (n + a_shift) + 1) pi)   (a sine peak)
///   rho_n   = min(rho_lin * delta_n, rho_quad * delta_n^2)
struct ApproxSpec {
  int omega = 4;
  double delta0 = 0.125;
  double delta_ratio = 0.5;
  int a_shift = 0;
  double rho_lin = 0.25;
  double rho_quad = 2.0;
  double sample_tol = 1e-8;

  double delta(int n) const;
  double a(int n) const;
  double rho(int n) const;
  void validate() const;
};

struct GrimReaperSpec {
  double c = 1.0;
  double lambda = 0.0;
};

struct ApproxFamily {
  std::vector<Polyline> inner;
  std::vector<Polyline> outer;
  ApproxSpec spec;
  TSCSpec tsc;
};

/// Connecting arc y = g(x), x in [0, beta].
Point2 tsc_arc_point(const TSCSpec& spec, double s);
double tsc_arc_height(const TSCSpec& spec, double x);

/// Pieces of T in CCW order around the region below the graph: arc (left to
/// right), graph (right to left down to x_min), truncation joins, and V.
struct TSCParts {
  std::vector<Point2> arc;
  std::vector<Point2> graph;
  std::vector<Point2> joins;  // from graph end to (0,1)
};
TSCParts tsc_parts(const TSCSpec& spec);

Polyline generate_tsc(const TSCSpec& spec);
Polyline generate_inner_approx(const TSCSpec& tsc, const ApproxSpec& spec, int n);
Polyline generate_outer_approx(const TSCSpec& tsc, const ApproxSpec& spec, int n);
ApproxFamily make_family(const TSCSpec& tsc, const ApproxSpec& spec, int n_max);

/// Samples y = sin(1/x) + offset on [x0, x1], breaking at extrema and zeros.
std::vector<Point2> sample_sine_graph(double x0, double x1, double offset, double tol, std::size_t budget);

double eval_grim_reaper(const GrimReaperSpec& spec, double x, double t);
double grim_reaper_slope(const GrimReaperSpec& spec, double x);
Polyline sample_grim_reaper(const GrimReaperSpec& spec, double t, double y_floor, double h);

struct IntersectCertificate {
  double x1 = 0, x2 = 0;
  double min_slope = 0, max_gamma_slope = 0;
  double half_exp_bound = 0;  // e^{2c}/2
  double gamma_bound = 0;     // 16 c^2 / pi^2
  double u_x1 = 0, u_x2 = 0;
  bool passes = false;
  bool within_gamma = false;  // [x1, x2] inside (0, 1], where the sine graph lives
};
IntersectCertificate lemma_intersect_certificate(const GrimReaperSpec& spec);

Polyline sample_circle(double r0, double t, int n_vertices);

/// Maximum transversal crossings with vertical lines.
int omega_graph_count(const Polyline& p);

nlohmann::json to_json(const TSCSpec& s);
nlohmann::json to_json(const ApproxSpec& s);
nlohmann::json to_json(const IntersectCertificate& c);
/// Missing keys keep their defaults.
TSCSpec tsc_spec_from_json(const nlohmann::json& j);
ApproxSpec approx_spec_from_json(const nlohmann::json& j);
GrimReaperSpec reaper_spec_from_json(const nlohmann::json& j);

}  // namespace sineflow
