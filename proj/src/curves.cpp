#include "sineflow/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sineflow/error.hpp"
#include "sineflow/intersections.hpp"
#include "sineflow/sampling.hpp"

namespace sineflow {

namespace {

constexpr double kPi = std::numbers::pi;

double peak_abscissa(int m) { return 2.0 / ((4.0 * m + 1.0) * kPi); }

Point2 bezier5(const std::array<Point2, 6>& c, double s) {
  static constexpr double binom[6] = {1, 5, 10, 10, 5, 1};
  const double u = 1.0 - s;
  Point2 out{0, 0};
  for (int k = 0; k < 6; ++k) out = out + binom[k] * std::pow(s, k) * std::pow(u, 5 - k) * c[k];
  return out;
}

bool linear_abscissae(const std::array<Point2, 6>& c) {
  const double step = (c[5].x - c[0].x) / 5.0;
  for (int k = 0; k < 6; ++k)
    if (std::abs(c[k].x - (c[0].x + k * step)) > 1e-15 * std::max(1.0, std::abs(c[5].x))) return false;
  return true;
}

// Corner joins: chains[i].back() == chains[i+1].front() (cyclically). Corners
// flagged in `round` are replaced by quadratic Bézier fillets with leg rho.
Polyline assemble(std::vector<std::vector<Point2>> chains, const std::vector<bool>& round, double rho, double tol) {
  const std::size_t k = chains.size();
  std::vector<std::vector<Point2>> fillets(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!round[i]) continue;
    auto& x = chains[i];
    auto& y = chains[(i + 1) % k];
    const Point2 corner = x.back();
    const Point2 a = point_at_arclength(std::vector<Point2>(x.rbegin(), x.rend()), rho);
    const Point2 b = point_at_arclength(y, rho);
    x = trim_back(x, rho);
    y = trim_front(y, rho);
    fillets[i].push_back(a);
    append_quadratic(a, corner, b, tol, fillets[i]);
    fillets[i].push_back(b);
  }
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& v : chains[i])
      if (pts.empty() || !(distance(pts.back(), v) <= 1e-14)) pts.push_back(v);
    for (const auto& v : fillets[i])
      if (pts.empty() || !(distance(pts.back(), v) <= 1e-14)) pts.push_back(v);
  }
  return make_polyline_dedup(std::move(pts), true, 1e-14);
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  // f(lo) and f(hi) have opposite signs.
  const bool lo_neg = f(lo) < 0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == lo_neg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Point2> sample_graph(const std::function<double(double)>& g, double x0, double x1, double tol) {
  std::vector<Point2> out;
  sample_adaptive([&](double x) { return Point2{x, g(x)}; }, x0, x1, tol, 1u << 24, out);
  return out;
}

double logcosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

TSCSpec TSCSpec::standard(int n_max, double beta) {
  TSCSpec s;
  s.beta = beta;
  const double ys[6] = {-1.0, -1.9, -1.9, -1.2, 0.2, std::sin(1.0 / beta)};
  for (int k = 0; k < 6; ++k) s.arc_ctrl[k] = {beta * k / 5.0, ys[k]};
  s.x_min = peak_abscissa(n_max + 2);
  return s;
}

void TSCSpec::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::InvalidInput, "beta must lie in (0, 1]");
  if (!(x_min > 0.0 && x_min < beta)) fail(ErrorKind::InvalidInput, "x_min must lie in (0, beta)");
  if (!(chord_tol > 0.0)) fail(ErrorKind::InvalidInput, "chord_tol must be positive");
  if (distance(arc_ctrl.front(), {0.0, -1.0}) > kTauGeo)
    fail(ErrorKind::InvalidInput, "arc must start at (0,-1)");
  if (distance(arc_ctrl.back(), {beta, std::sin(1.0 / beta)}) > kTauGeo)
    fail(ErrorKind::InvalidInput, "arc must end at (beta, sin(1/beta))");
  for (int k = 1; k < 6; ++k)
    if (!(arc_ctrl[k].x > arc_ctrl[k - 1].x)) fail(ErrorKind::InvalidInput, "arc control abscissae must increase");
  // Arc strictly below the graph on (0, beta).
  const int m = 20000;
  for (int i = 1; i < m; ++i) {
    const double x = beta * std::pow(static_cast<double>(i) / m, 2.0);
    const double g = tsc_arc_height(*this, x);
    if (g < -1.0) continue;
    if (!(std::sin(1.0 / x) - g > 0.0))
      fail(ErrorKind::InvalidInput, "arc meets the sine graph near x = " + std::to_string(x));
  }
}

double ApproxSpec::delta(int n) const { return delta0 * std::pow(delta_ratio, n); }
double ApproxSpec::a(int n) const { return peak_abscissa(n + a_shift); }
double ApproxSpec::rho(int n) const { return std::min(rho_lin * delta(n), rho_quad * delta(n) * delta(n)); }

void ApproxSpec::validate() const {
  if (omega < 1) fail(ErrorKind::InvalidInput, "omega must be positive");
  if (!(delta0 > 0.0) || !(delta_ratio > 0.0 && delta_ratio < 1.0))
    fail(ErrorKind::InvalidInput, "delta rule must decrease to 0");
  if (a_shift < 0) fail(ErrorKind::InvalidInput, "a_shift must be nonnegative");
  if (!(rho_lin > 0.0 && rho_lin < 0.5) || !(rho_quad > 0.0))
    fail(ErrorKind::InvalidInput, "corner radius rule must satisfy 0 < rho_n < delta_n/2");
  if (!(sample_tol > 0.0)) fail(ErrorKind::InvalidInput, "sample_tol must be positive");
}

Point2 tsc_arc_point(const TSCSpec& spec, double s) { return bezier5(spec.arc_ctrl, s); }

double tsc_arc_height(const TSCSpec& spec, double x) {
  const auto& c = spec.arc_ctrl;
  if (linear_abscissae(c)) return bezier5(c, (x - c[0].x) / (c[5].x - c[0].x)).y;
  // Monotone abscissa: invert by bisection (extrapolates linearly outside [0,1]).
  double lo = -0.5, hi = 1.5;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bezier5(c, mid).x < x)
      lo = mid;
    else
      hi = mid;
  }
  return bezier5(c, 0.5 * (lo + hi)).y;
}

std::vector<Point2> sample_sine_graph(double x0, double x1, double offset, double tol, std::size_t budget) {
  if (!(x0 > 0.0 && x1 > x0)) fail(ErrorKind::InvalidInput, "sine graph needs 0 < x0 < x1");
  // Breakpoints at 1/x = k pi/2 (extrema and zeros).
  std::vector<double> breaks{x0};
  const long k_hi = static_cast<long>(std::floor(2.0 / (kPi * x0)));
  const long k_lo = static_cast<long>(std::ceil(2.0 / (kPi * x1)));
  for (long k = k_hi; k >= std::max(1L, k_lo); --k) {
    const double x = 2.0 / (k * kPi);
    if (x > x0 && x < x1) breaks.push_back(x);
  }
  breaks.push_back(x1);
  std::vector<Point2> out;
  sample_adaptive([offset](double x) { return Point2{x, std::sin(1.0 / x) + offset}; }, breaks, tol, budget, out);
  return out;
}

TSCParts tsc_parts(const TSCSpec& spec) {
  spec.validate();
  TSCParts parts;
  sample_adaptive([&](double s) { return tsc_arc_point(spec, s); }, 0.0, 1.0, spec.chord_tol, spec.n_graph,
                  parts.arc);
  parts.arc.front() = {0.0, -1.0};
  parts.arc.back() = {spec.beta, std::sin(1.0 / spec.beta)};
  auto g = sample_sine_graph(spec.x_min, spec.beta, 0.0, spec.chord_tol, spec.n_graph);
  parts.graph.assign(g.rbegin(), g.rend());
  const Point2 end = parts.graph.back();
  if (std::abs(end.y - 1.0) > 1e-12) parts.joins.push_back({spec.x_min, 1.0});
  parts.joins.push_back({0.0, 1.0});
  return parts;
}

Polyline generate_tsc(const TSCSpec& spec) {
  const auto parts = tsc_parts(spec);
  std::vector<Point2> pts = parts.arc;
  pts.insert(pts.end(), parts.graph.begin() + 1, parts.graph.end());
  pts.insert(pts.end(), parts.joins.begin(), parts.joins.end());
  // The closing edge (0,1) -> (0,-1) is V.
  return Polyline(std::move(pts), true);
}

Polyline generate_inner_approx(const TSCSpec& tsc, const ApproxSpec& spec, int n) {
  if (n < 1) fail(ErrorKind::InvalidInput, "n must be at least 1");
  tsc.validate();
  spec.validate();
  const double d = spec.delta(n), a = spec.a(n), rho = spec.rho(n), tol = spec.sample_tol;
  if (!(a < tsc.beta)) fail(ErrorKind::ConstructionError, "a_n beyond beta");
  auto g = [&](double x) { return tsc_arc_height(tsc, x); };
  auto gap = [&](double x) { return std::sin(1.0 / x) - g(x) - 2.0 * d; };
  // Right wedge: the two offsets meet at x_R.
  double hi = tsc.beta, lo = tsc.beta;
  const double step = d / 64.0;
  while (gap(lo) <= 0.0) {
    hi = lo;
    lo -= step;
    if (lo <= a) fail(ErrorKind::ConstructionError, "offsets never separate; decrease delta_n");
  }
  const double xr = bisect(gap, lo, hi);
  if (!(1.0 - d > g(a) + d)) fail(ErrorKind::ConstructionError, "cap collapses at a_n");

  std::vector<Point2> bottom = sample_graph([&](double x) { return g(x) + d; }, a, xr, tol);
  auto top_lr = sample_sine_graph(a, xr, -d, tol, 1u << 24);
  top_lr.back() = bottom.back();
  std::vector<Point2> top(top_lr.rbegin(), top_lr.rend());
  top.back() = {a, 1.0 - d};
  std::vector<Point2> cap{top.back(), bottom.front()};
  const auto p = assemble({bottom, top, cap}, {true, true, true}, rho, tol);
  if (auto hit = find_self_intersection(p, kTauGeo))
    fail(ErrorKind::ConstructionError, "inner approximation n=" + std::to_string(n) + " self-intersects");
  return p;
}

Polyline generate_outer_approx(const TSCSpec& tsc, const ApproxSpec& spec, int n) {
  if (n < 1) fail(ErrorKind::InvalidInput, "n must be at least 1");
  tsc.validate();
  spec.validate();
  const double d = spec.delta(n), a = spec.a(n), rho = spec.rho(n), tol = spec.sample_tol;
  auto g = [&](double x) { return tsc_arc_height(tsc, x); };
  // Right cap just beyond beta with a gap of at least d/2.
  double k = 1.0;
  auto cap_gap = [&](double x) { return (std::sin(1.0 / x) + d) - (g(x) - d); };
  while (cap_gap(tsc.beta + k * d) < 0.5 * d) {
    k *= 0.5;
    if (k < 1e-6) fail(ErrorKind::ConstructionError, "no room for the outer right cap");
  }
  const double xc = tsc.beta + k * d;

  std::vector<Point2> left{{-d, 1.0 + d}, {-d, -1.0 - d}};
  std::vector<Point2> low{{-d, -1.0 - d}, {0.0, -1.0 - d}};
  std::vector<Point2> bottom = sample_graph([&](double x) { return g(x) - d; }, 0.0, xc, tol);
  bottom.front() = low.back();
  std::vector<Point2> right{bottom.back(), {xc, std::sin(1.0 / xc) + d}};
  auto top_lr = sample_sine_graph(a, xc, d, tol, 1u << 24);
  std::vector<Point2> top(top_lr.rbegin(), top_lr.rend());
  top.front() = right.back();
  top.back() = {a, 1.0 + d};
  std::vector<Point2> high{top.back(), left.front()};
  const auto p = assemble({left, low, bottom, right, top, high}, {true, true, true, true, false, true}, rho, tol);
  if (find_self_intersection(p, kTauGeo))
    fail(ErrorKind::ConstructionError, "outer approximation n=" + std::to_string(n) + " self-intersects");
  return p;
}

ApproxFamily make_family(const TSCSpec& tsc, const ApproxSpec& spec, int n_max) {
  ApproxFamily f{{}, {}, spec, tsc};
  for (int n = 1; n <= n_max; ++n) {
    f.inner.push_back(generate_inner_approx(tsc, spec, n));
    f.outer.push_back(generate_outer_approx(tsc, spec, n));
  }
  return f;
}

double eval_grim_reaper(const GrimReaperSpec& spec, double x, double t) {
  if (!(spec.c > 0.0)) fail(ErrorKind::InvalidInput, "c must be positive");
  if (!(std::abs(x) < kPi / (2.0 * spec.c) - kTauGeo))
    fail(ErrorKind::DomainError, "x outside (-pi/2c, pi/2c)");
  return std::log(std::cos(spec.c * x)) / spec.c + 3.0 + spec.lambda - spec.c * t;
}

double grim_reaper_slope(const GrimReaperSpec& spec, double x) { return -std::tan(spec.c * x); }

Polyline sample_grim_reaper(const GrimReaperSpec& spec, double t, double y_floor, double h) {
  if (!(spec.c > 0.0) || !(h > 0.0) || !(t >= 0.0)) fail(ErrorKind::InvalidInput, "bad reaper sampling parameters");
  const double c = spec.c;
  const double apex = 3.0 + spec.lambda - c * t;
  if (!(y_floor < apex)) fail(ErrorKind::EmptyCurve, "y_floor at or above the apex");
  // Arclength from the apex: y = apex - log(cosh(c s))/c, x = atan(sinh(c s))/c.
  const double z = c * (apex - y_floor);
  const double cs_max = z > 20.0 ? z + std::numbers::ln2 : std::acosh(std::exp(z));
  const double s_max = cs_max / c;
  const auto half = static_cast<long>(std::ceil(s_max / h));
  std::vector<Point2> pts;
  pts.reserve(2 * half + 1);
  for (long k = -half; k <= half; ++k) {
    const double s = s_max * static_cast<double>(k) / static_cast<double>(half);
    pts.push_back({std::atan(std::sinh(c * s)) / c, apex - logcosh(c * s) / c});
  }
  pts[half] = {0.0, apex};
  return make_polyline_dedup(std::move(pts), false);
}

IntersectCertificate lemma_intersect_certificate(const GrimReaperSpec& spec) {
  const double c = spec.c, lam = spec.lambda;
  if (!(c > 1.0)) fail(ErrorKind::OutOfHypothesis, "lemma requires c > 1");
  if (!(lam >= 0.0 && lam <= 6.0)) fail(ErrorKind::OutOfHypothesis, "lemma requires 0 <= lambda <= 6");
  IntersectCertificate r;
  const double z1 = std::exp((-2.0 - lam) * c);
  const double z2 = std::exp((-4.0 - lam) * c);
  r.x1 = std::acos(z1) / c;
  r.x2 = std::acos(z2) / c;
  // tan(arccos z) = sqrt(1 - z^2) / z.
  r.min_slope = std::sqrt(1.0 - z1 * z1) / z1;
  r.max_gamma_slope = std::pow(c / std::acos(z1), 2);
  r.half_exp_bound = 0.5 * std::exp(2.0 * c);
  r.gamma_bound = 16.0 * c * c / (kPi * kPi);
  // Residuals in edge-offset form w = pi/(2c) - x, where u = ln(sin(c w))/c + 3 + lambda;
  // plain cos(c x) loses all digits once z falls below machine epsilon.
  const double w1 = (kPi / 2.0 - std::acos(z1)) / c;
  const double w2 = (kPi / 2.0 - std::acos(z2)) / c;
  auto u_edge = [&](double w, double z) {
    // Small offsets: pi/2 - acos(z) cancels, use the equivalent asin(z).
    const double cw = (c * w < 1e-4) ? std::asin(z) : c * w;
    return std::log(std::sin(cw)) / c + 3.0 + lam;
  };
  r.u_x1 = u_edge(w1, z1);
  r.u_x2 = u_edge(w2, z2);
  const bool heights_ok = std::abs(r.u_x1 - 1.0) <= 1e-9 && std::abs(r.u_x2 + 1.0) <= 1e-9;
  r.passes = r.min_slope > r.max_gamma_slope && heights_ok;
  r.within_gamma = r.x2 <= 1.0;
  return r;
}

Polyline sample_circle(double r0, double t, int n_vertices) {
  if (!(r0 > 0.0) || n_vertices < 3 || !(t >= 0.0)) fail(ErrorKind::InvalidInput, "bad circle parameters");
  if (2.0 * t >= r0 * r0) fail(ErrorKind::Extinct, "circle extinct at t = r0^2/2");
  const double r = std::sqrt(r0 * r0 - 2.0 * t);
  std::vector<Point2> pts;
  pts.reserve(n_vertices);
  for (int k = 0; k < n_vertices; ++k) {
    const double th = 2.0 * kPi * k / n_vertices;
    pts.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return Polyline(std::move(pts), true);
}

int omega_graph_count(const Polyline& p) { return max_vertical_crossings(p).max_count; }

nlohmann::json to_json(const TSCSpec& s) {
  nlohmann::json ctrl = nlohmann::json::array();
  for (const auto& c : s.arc_ctrl) ctrl.push_back({c.x, c.y});
  return {{"beta", s.beta}, {"arc_ctrl", ctrl}, {"n_graph", s.n_graph}, {"x_min", s.x_min}, {"chord_tol", s.chord_tol}};
}

nlohmann::json to_json(const ApproxSpec& s) {
  return {{"omega", s.omega},     {"delta0", s.delta0},   {"delta_ratio", s.delta_ratio}, {"a_shift", s.a_shift},
          {"rho_lin", s.rho_lin}, {"rho_quad", s.rho_quad}, {"sample_tol", s.sample_tol}};
}

nlohmann::json to_json(const IntersectCertificate& c) {
  return {{"x1", c.x1},
          {"x2", c.x2},
          {"min_slope", c.min_slope},
          {"max_gamma_slope", c.max_gamma_slope},
          {"half_exp_bound", c.half_exp_bound},
          {"gamma_bound", c.gamma_bound},
          {"u_x1", c.u_x1},
          {"u_x2", c.u_x2},
          {"passes", c.passes},
          {"within_gamma", c.within_gamma}};
}

TSCSpec tsc_spec_from_json(const nlohmann::json& j) {
  try {
    TSCSpec s = TSCSpec::standard(j.value("n_max", 8), j.value("beta", 1.0));
    if (j.contains("arc_ctrl")) {
      const auto& a = j.at("arc_ctrl");
      if (a.size() != 6) fail(ErrorKind::InvalidInput, "arc_ctrl needs 6 points");
      for (int k = 0; k < 6; ++k) s.arc_ctrl[k] = {a[k].at(0).get<double>(), a[k].at(1).get<double>()};
    }
    s.n_graph = j.value("n_graph", s.n_graph);
    s.x_min = j.value("x_min", s.x_min);
    s.chord_tol = j.value("chord_tol", s.chord_tol);
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad tsc config: ") + e.what());
  }
}

ApproxSpec approx_spec_from_json(const nlohmann::json& j) {
  try {
    ApproxSpec s;
    s.omega = j.value("omega", s.omega);
    s.delta0 = j.value("delta0", s.delta0);
    s.delta_ratio = j.value("delta_ratio", s.delta_ratio);
    s.a_shift = j.value("a_shift", s.a_shift);
    s.rho_lin = j.value("rho_lin", s.rho_lin);
    s.rho_quad = j.value("rho_quad", s.rho_quad);
    s.sample_tol = j.value("sample_tol", s.sample_tol);
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad approx config: ") + e.what());
  }
}

GrimReaperSpec reaper_spec_from_json(const nlohmann::json& j) {
  try {
    return {j.value("c", 1.0), j.value("lambda", 0.0)};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad reaper config: ") + e.what());
  }
}

}  // namespace sineflow
