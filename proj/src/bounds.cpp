#include "sineflow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sineflow/intersections.hpp"
#include "sineflow/io.hpp"

namespace sineflow {

namespace {

constexpr double kPi = std::numbers::pi;

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

double total_length(std::span<const Polyline> pieces) {
  double s = 0.0;
  for (const auto& p : pieces) s += polyline_length(p);
  return s;
}

}  // namespace

void IntervalFamily::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) fail(ErrorKind::InvalidInput, "interval family needs L > 0");
  for (const auto& [a, b] : intervals)
    if (!(a <= b) || a < 0.0 || b > L) fail(ErrorKind::InvalidInput, "intervals must satisfy 0 <= a <= b <= L");
}

int multiplicity(const IntervalFamily& fam, double x) {
  int m = 0;
  for (const auto& [a, b] : fam.intervals) m += (a <= x && x <= b);
  return m;
}

IntervalSumBound interval_sum_bound(const IntervalFamily& fam) {
  fam.validate();
  IntervalSumBound r;
  // Endpoint events: +1 at a, -1 just after b. Closed intervals make the
  // count at an endpoint include both those starting and ending there.
  std::vector<double> u{0.0, fam.L};
  for (const auto& [a, b] : fam.intervals) {
    u.push_back(a);
    u.push_back(b);
    r.total += b - a;
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const std::size_t k = u.size();
  auto idx = [&](double v) { return static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), v) - u.begin()); };
  std::vector<int> d_at(k + 1, 0), d_cell(k + 1, 0);
  for (const auto& [a, b] : fam.intervals) {
    const std::size_t i = idx(a), j = idx(b);
    d_at[i] += 1;
    d_at[j + 1] -= 1;
    if (j > i) {
      d_cell[i] += 1;
      d_cell[j] -= 1;
    }
  }
  int ca = 0, cc = 0;
  for (std::size_t i = 0; i < k; ++i) {
    ca += d_at[i];
    cc += d_cell[i];
    r.M = std::max({r.M, ca, i + 1 < k ? cc : 0});
  }
  r.bound = r.M * fam.L;
  r.holds = r.total <= r.bound + 1e-12;
  return r;
}

double MonotonePiece::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) s += distance(points[i], points[i + 1]);
  return s;
}

std::vector<MonotonePiece> monotone_decomposition(std::span<const Polyline> clipped) {
  std::vector<MonotonePiece> out;
  for (const auto& comp : clipped) {
    const auto& v = comp.vertices();
    std::vector<Point2> pts(v.begin(), v.end());
    if (comp.closed() && !pts.empty()) pts.push_back(pts.front());
    if (pts.size() < 2) continue;
    MonotonePiece cur;
    cur.points.push_back(pts[0]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const int sx = sgn(pts[i + 1].x - pts[i].x), sy = sgn(pts[i + 1].y - pts[i].y);
      const bool turn_x = sx != 0 && cur.sx != 0 && sx != cur.sx;
      const bool turn_y = sy != 0 && cur.sy != 0 && sy != cur.sy;
      if (turn_x || turn_y) {
        out.push_back(std::move(cur));
        cur = MonotonePiece{};
        cur.points.push_back(pts[i]);
      }
      if (sx != 0) cur.sx = sx;
      if (sy != 0) cur.sy = sy;
      cur.points.push_back(pts[i + 1]);
    }
    if (cur.points.size() >= 2) out.push_back(std::move(cur));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const MonotonePiece& p) { return !(p.length() > 0.0); }),
            out.end());
  return out;
}

std::vector<MonotonePiece> monotone_decomposition(const Polyline& p, double eps, Point2 center) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (p.size() < 2 || !(polyline_length(p) > 0.0)) return {};
  const auto clipped = restrict_to_box(p, Box::centered(center, eps));
  return monotone_decomposition(clipped);
}

HypothesisViolationError::HypothesisViolationError(LineSpec witness, int count, int M)
    : Error(ErrorKind::HypothesisViolation, "a line meets the curve " + std::to_string(count) + " times, more than M = " +
                                                std::to_string(M)),
      witness_(witness),
      count_(count) {}

std::pair<int, LineSpec> measure_grid_crossings(std::span<const Polyline> pieces) {
  const AxisSweep v = max_vertical_crossings(pieces), h = max_horizontal_crossings(pieces);
  if (v.max_count >= h.max_count) return {v.max_count, LineSpec({v.at, 0.0}, {0.0, 1.0})};
  return {h.max_count, LineSpec({0.0, h.at}, {1.0, 0.0})};
}

GridBound grid_length_bound(std::span<const Polyline> clipped, double eps, int M, Point2 center) {
  if (!(eps > 0.0) || M < 1) fail(ErrorKind::InvalidInput, "grid bound needs eps > 0 and M >= 1");
  GridBound r;
  const auto [measured, witness] = measure_grid_crossings(clipped);
  r.measured_M = measured;
  if (measured > M) throw HypothesisViolationError(witness, measured, M);
  r.length = total_length(clipped);
  r.bound = 4.0 * M * eps;
  r.holds = r.length <= r.bound + 1e-9;

  const auto pieces = monotone_decomposition(clipped);
  r.pieces = pieces.size();
  IntervalFamily fx{{}, 2.0 * eps}, fy{{}, 2.0 * eps};
  auto clamp01 = [&](double v) { return std::clamp(v, 0.0, 2.0 * eps); };
  for (const auto& pc : pieces) {
    const double dx = std::abs(pc.end().x - pc.start().x), dy = std::abs(pc.end().y - pc.start().y);
    const double len = pc.length();
    // Monotone in both coordinates: length is at most |dx| + |dy|.
    if (len > (dx + dy) * (1.0 + 1e-12) + 1e-15)
      fail(ErrorKind::InvalidState, "monotone piece longer than its projections");
    r.projection_sum += dx + dy;
    const double x0 = std::min(pc.start().x, pc.end().x) - (center.x - eps);
    const double y0 = std::min(pc.start().y, pc.end().y) - (center.y - eps);
    fx.intervals.push_back({clamp01(x0), clamp01(x0 + dx)});
    fy.intervals.push_back({clamp01(y0), clamp01(y0 + dy)});
  }
  r.x_projections = interval_sum_bound(fx);
  r.y_projections = interval_sum_bound(fy);
  return r;
}

GridBound grid_length_bound(const Polyline& p, double eps, int M, Point2 center) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  const auto clipped = restrict_to_box(p, Box::centered(center, eps));
  return grid_length_bound(clipped, eps, M, center);
}

double operator_norm(const std::array<double, 4>& m) {
  // sigma_max^2 is the larger eigenvalue of M^T M.
  const double a = m[0], b = m[1], c = m[2], d = m[3];
  const double p = a * a + c * c, q = a * b + c * d, r = b * b + d * d;
  const double mean = 0.5 * (p + r), diff = 0.5 * (p - r);
  return std::sqrt(mean + std::sqrt(diff * diff + q * q));
}

DiffMap identity_map() {
  return {"identity", [](Point2 p) { return p; }, [](Point2 p) { return p; },
          [](Point2) { return std::array<double, 4>{1.0, 0.0, 0.0, 1.0}; }, 1.0, 1.0};
}

double shear_d(double theta) {
  const double t = std::tan(theta);
  return 2.0 * std::max(t, 1.0 / t);
}

DiffMap build_shear(double theta) {
  if (!(theta >= 1e-6 && theta <= kPi / 2.0 - 1e-6)) fail(ErrorKind::InvalidInput, "shear angle must lie in (0, pi/2)");
  const double t = std::tan(theta);
  const double d = shear_d(theta);
  return {"shear",
          [t](Point2 p) { return Point2{p.x * t - p.y, p.y}; },
          [t](Point2 p) { return Point2{(p.x + p.y) / t, p.y}; },
          [t](Point2) { return std::array<double, 4>{t, -1.0, 0.0, 1.0}; },
          d,
          1.0 / d};
}

WindowTooWideError::WindowTooWideError(double sup_slope)
    : Error(ErrorKind::WindowTooWide, "sup |u'| over the window is " + format_double(sup_slope)),
      sup_slope_(sup_slope) {}

DiffMap build_flatten(const GrimReaperSpec& reaper, double t, double x_lo, double x_hi, double alpha) {
  if (!(reaper.c > 0.0) || !(x_lo <= x_hi) || !(alpha > 0.0 && alpha <= 0.5))
    fail(ErrorKind::InvalidInput, "flatten needs c > 0, x_lo <= x_hi and 0 < alpha <= 0.5");
  const double c = reaper.c;
  const double edge = kPi / (2.0 * c);
  const double far = std::max(std::abs(x_lo), std::abs(x_hi));
  const double sup = far >= edge ? INFINITY : std::tan(c * far);
  if (!(sup <= alpha * (1.0 + 1e-12))) throw WindowTooWideError(sup);
  const GrimReaperSpec g = reaper;
  auto u = [g, t](double x) { return eval_grim_reaper(g, x, t); };
  return {"flatten",
          [u](Point2 p) { return Point2{p.x, p.y - u(p.x)}; },
          [u](Point2 p) { return Point2{p.x, p.y + u(p.x)}; },
          [g](Point2 p) { return std::array<double, 4>{1.0, 0.0, -grim_reaper_slope(g, p.x), 1.0}; },
          2.0,
          0.5};
}

TransformedBound transformed_length_bound(std::span<const Polyline> pieces, const DiffMap& map, double eps, int M,
                                          Point2 center) {
  if (!(eps > 0.0) || M < 1) fail(ErrorKind::InvalidInput, "transformed bound needs eps > 0 and M >= 1");
  const double slack = 1e-9 * std::max(1.0, eps);
  for (const auto& p : pieces)
    for (const auto& v : p.vertices())
      if (distance(v, center) > eps + slack) fail(ErrorKind::InvalidInput, "curve leaves B_eps");
  const double d = map.jac_norm_hi;
  const Point2 fc = map.forward(center);
  std::vector<Polyline> image;
  TransformedBound r;
  r.image_in_ball = true;
  for (const auto& p : pieces) {
    image.push_back(transform(p, map.forward));
    for (const auto& v : image.back().vertices())
      if (distance(v, fc) > d * eps + slack) r.image_in_ball = false;
  }
  const auto [measured, witness] = measure_grid_crossings(image);
  r.measured_M = measured;
  if (measured > M) throw HypothesisViolationError(witness, measured, M);
  r.length = total_length(pieces);
  r.image_length = total_length(image);
  r.image_bound = 4.0 * M * d * eps;
  r.bound = 4.0 * M * d * d * eps;
  r.holds = r.length <= r.bound + 1e-9;
  return r;
}

TransformedBound transformed_length_bound(const Polyline& p, const DiffMap& map, double eps, int M, Point2 center) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  const auto clipped = restrict_to_ball(p, Ball(center, eps));
  return transformed_length_bound(clipped, map, eps, M, center);
}

bool on_V(Point2 x) { return x.x == 0.0 && std::abs(x.y) <= 1.0; }

namespace {

// Distance from V = {0} x [-1, 1] to the line through x with direction angle phi.
double line_V_distance(Point2 x, double phi) {
  const Vec2 nrm{-std::sin(phi), std::cos(phi)};
  const double s0 = dot(Point2{0.0, -1.0} - x, nrm), s1 = dot(Point2{0.0, 1.0} - x, nrm);
  if (s0 * s1 <= 0.0) return 0.0;
  return std::min(std::abs(s0), std::abs(s1));
}

// Max crossings of T with lines of direction phi at signed offsets |s| < eps from x.
int band_crossings(const Polyline& T, Point2 x, double phi, double eps) {
  const double c = std::cos(phi), s = std::sin(phi);
  // Rotate so the direction becomes the x axis.
  const Polyline r = transform(T, [&](Point2 p) {
    const Vec2 q = p - x;
    return Point2{c * q.x + s * q.y, -s * q.x + c * q.y};
  });
  const Box band{{-1e9, -eps}, {1e9, eps}};
  const auto clipped = restrict_to_box(r, band);
  return max_horizontal_crossings(clipped).max_count;
}

}  // namespace

Case1Setup case1_recipe(const Polyline& T, Point2 x, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (on_V(x)) fail(ErrorKind::OutOfHypothesis, "Case 1 needs x off V");
  // Feasible directions (mod pi) form arcs; take the widest.
  constexpr int kSteps = 7200;
  std::vector<char> ok(kSteps);
  for (int k = 0; k < kSteps; ++k) ok[k] = line_V_distance(x, kPi * k / kSteps) >= 2.0 * eps;
  int best_len = 0, best_start = 0;
  if (std::all_of(ok.begin(), ok.end(), [](char v) { return v; })) {
    best_len = kSteps;
  } else {
    int first_bad = static_cast<int>(std::find(ok.begin(), ok.end(), 0) - ok.begin());
    for (int k = 0, run = 0, start = 0; k <= kSteps; ++k) {
      const int i = (first_bad + 1 + k) % kSteps;
      if (k < kSteps && ok[i]) {
        if (run == 0) start = i;
        ++run;
      } else {
        if (run > best_len) {
          best_len = run;
          best_start = start;
        }
        run = 0;
      }
    }
  }
  if (best_len < 2) fail(ErrorKind::OutOfHypothesis, "no line pair through x keeps distance 2 eps from V");
  const double width = kPi * (best_len - 1) / kSteps;
  Case1Setup r;
  r.x = x;
  r.eps = eps;
  r.theta = std::min(width, kPi / 4.0);
  const double mid = kPi * best_start / kSteps + 0.5 * width;
  r.phi1 = mid - 0.5 * r.theta;
  r.phi2 = mid + 0.5 * r.theta;
  r.line_distance = std::min(line_V_distance(x, r.phi1), line_V_distance(x, r.phi2));
  r.d = shear_d(r.theta);
  r.C = std::max(band_crossings(T, x, r.phi1, eps), band_crossings(T, x, r.phi2, eps));
  r.bound = 4.0 * r.C * r.d * r.d * eps;
  r.bound_intbound = 2.0 * r.bound;
  return r;
}

int reaper_crossings(const Polyline& curve, const GrimReaperSpec& reaper, double t) {
  double ymin = INFINITY;
  for (const auto& v : curve.vertices()) ymin = std::min(ymin, v.y);
  const double apex = 3.0 + reaper.lambda - reaper.c * t;
  const double floor = std::min(ymin, apex) - 1.0;
  const double h = std::min(0.01, 0.1 / reaper.c);
  const Polyline u = sample_grim_reaper(reaper, t, floor, h);
  return count_crossings(curve, u).count;
}

Case2Setup case2_recipe(const ApproxFamily& fam, double t0, double alpha, int lambda_samples) {
  if (!(t0 > 0.0) || !(alpha > 0.0 && alpha <= 0.5) || lambda_samples < 2)
    fail(ErrorKind::InvalidInput, "Case 2 needs t0 > 0, 0 < alpha <= 0.5, and two or more lambda samples");
  Case2Setup r;
  r.t0 = t0;
  r.alpha = alpha;
  r.c = 6.0 / t0;
  r.eps = std::atan(alpha) / r.c;
  // Certifies the slope bound on the window.
  build_flatten({r.c, 0.0}, t0, -r.eps, r.eps, alpha);
  for (const auto& g : fam.inner) {
    r.omega = std::max(r.omega, omega_graph_count(g));
    for (int k = 0; k < lambda_samples; ++k) {
      const double lam = 6.0 * k / (lambda_samples - 1);
      r.C = std::max(r.C, reaper_crossings(g, {r.c, lam}, 0.0));
    }
  }
  const int m = std::max(r.C, r.omega);
  r.bound = 4.0 * m * r.eps;
  r.bound_jacobian = 16.0 * m * r.eps;
  return r;
}

LocalLengthTable local_length_table(std::span<const FlowOutcome> evolved, int first_n, Point2 x, double t, double eps,
                                    double bound) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  LocalLengthTable tab;
  tab.x = x;
  tab.t = t;
  tab.eps = eps;
  tab.which_case = on_V(x) ? 2 : 1;
  tab.bound = bound;
  const Ball ball(x, eps);
  for (std::size_t k = 0; k < evolved.size(); ++k) {
    LocalLengthRow row;
    row.n = first_n + static_cast<int>(k);
    if (evolved[k].extinct_at) {
      row.excluded = true;
      row.note = "extinct at t = " + format_double(*evolved[k].extinct_at);
    } else {
      const auto clipped = restrict_to_ball(evolved[k].state.curve, ball);
      row.length = total_length(clipped);
      row.measured_M = measure_grid_crossings(clipped).first;
      row.holds = row.length <= bound + 1e-9;
      tab.sup = std::max(tab.sup, row.length);
      tab.holds = tab.holds && row.holds;
    }
    row.running_sup = tab.sup;
    tab.rows.push_back(row);
  }
  return tab;
}

LocalLengthTable local_length_experiment(const ApproxFamily& fam, Point2 x, double t, double eps,
                                         const ExperimentOptions& opt) {
  if (!(t > 0.0)) fail(ErrorKind::InvalidInput, "experiment time must be positive");
  if (fam.inner.empty()) fail(ErrorKind::InvalidInput, "empty family");
  nlohmann::json setup;
  double bound = 0.0;
  if (on_V(x)) {
    const Case2Setup s = case2_recipe(fam, t, opt.alpha);
    const bool wide = eps > s.eps * (1.0 + 1e-12);
    if (wide && !opt.allow_wide_window) {
      const double c = s.c;
      throw WindowTooWideError(eps * c >= kPi / 2.0 ? INFINITY : std::tan(c * eps));
    }
    bound = 4.0 * std::max(s.C, s.omega) * eps;
    setup = to_json(s);
    setup["wide_window"] = wide;
  } else {
    const Case1Setup s = case1_recipe(generate_tsc(fam.tsc), x, eps);
    bound = s.bound;
    setup = to_json(s);
  }
  std::vector<FlowState> states;
  for (const auto& g : fam.inner) states.push_back(make_flow_state(g, opt.mesh_h, opt.flow));
  const auto out = evolve_family(states, t, opt.flow);
  auto tab = local_length_table(out, 1, x, t, eps, bound);
  tab.setup = std::move(setup);
  return tab;
}

nlohmann::json to_json(const IntervalSumBound& b) {
  return {{"M", b.M}, {"total", b.total}, {"bound", b.bound}, {"holds", b.holds}};
}

nlohmann::json to_json(const GridBound& b) {
  return {{"length", b.length},
          {"bound", b.bound},
          {"holds", b.holds},
          {"measured_M", b.measured_M},
          {"pieces", b.pieces},
          {"projection_sum", b.projection_sum},
          {"x_projections", to_json(b.x_projections)},
          {"y_projections", to_json(b.y_projections)}};
}

nlohmann::json to_json(const TransformedBound& b) {
  return {{"length", b.length},          {"bound", b.bound},         {"holds", b.holds},
          {"image_length", b.image_length}, {"image_bound", b.image_bound}, {"image_in_ball", b.image_in_ball},
          {"measured_M", b.measured_M}};
}

nlohmann::json to_json(const Case1Setup& s) {
  return {{"case", 1},         {"x", {s.x.x, s.x.y}}, {"eps", s.eps},       {"phi1", s.phi1},
          {"phi2", s.phi2},    {"theta", s.theta},    {"d", s.d},           {"line_distance", s.line_distance},
          {"C", s.C},          {"bound", s.bound},    {"bound_intbound", s.bound_intbound}};
}

nlohmann::json to_json(const Case2Setup& s) {
  return {{"case", 2},       {"t0", s.t0},       {"c", s.c},         {"alpha", s.alpha},
          {"eps", s.eps},    {"C", s.C},         {"omega", s.omega}, {"bound", s.bound},
          {"bound_jacobian", s.bound_jacobian}};
}

nlohmann::json to_json(const LocalLengthTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json j{{"n", r.n},           {"length", r.length}, {"running_sup", r.running_sup},
                     {"measured_M", r.measured_M}, {"holds", r.holds}, {"excluded", r.excluded}};
    if (!r.note.empty()) j["note"] = r.note;
    rows.push_back(j);
  }
  return {{"x", {t.x.x, t.x.y}}, {"t", t.t},       {"eps", t.eps},     {"case", t.which_case}, {"bound", t.bound},
          {"sup", t.sup},        {"holds", t.holds}, {"rows", rows},   {"setup", t.setup}};
}

std::string to_csv(const LocalLengthTable& t) {
  std::ostringstream os;
  os << "n,length,bound,holds\n";
  for (const auto& r : t.rows) {
    if (r.excluded) continue;
    os << r.n << ',' << format_double(r.length) << ',' << format_double(t.bound) << ',' << (r.holds ? "true" : "false")
       << '\n';
  }
  return os.str();
}

}  // namespace sineflow
