#include "sineflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sineflow/error.hpp"

namespace sineflow {

namespace {

// Parameter in (0, 1] where a + s (b - a) leaves the ball of radius r around c,
// assuming a is inside and b is not.
double exit_parameter(Point2 a, Point2 b, Point2 c, double r) {
  const Vec2 d = b - a, f = a - c;
  const double A = dot(d, d), B = 2.0 * dot(f, d), C = dot(f, f) - r * r;
  const double disc = std::max(0.0, B * B - 4.0 * A * C);
  const double s = (-B + std::sqrt(disc)) / (2.0 * A);
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

CoverEstimate h1_cover_points(const Polyline& p, double eps) {
  const double L = polyline_length(p);
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (!(eps < L)) fail(ErrorKind::InvalidInput, "eps must be smaller than the curve length");

  CoverEstimate out;
  out.delta = eps;
  out.length = L;
  const double r = 0.5 * eps;
  Point2 center = p[0];
  out.centers.push_back(center);

  Point2 cur = p[0];
  const std::size_t edges = p.edge_count();
  std::size_t e = 0;
  while (e < edges) {
    const Point2 b = p.edge_end(e);
    if (distance(b, center) >= r) {
      const double s = exit_parameter(cur, b, center, r);
      center = cur + s * (b - cur);
      out.centers.push_back(center);
      cur = center;
      if (s >= 1.0) ++e;
    } else {
      cur = b;
      ++e;
    }
  }

  // The walk ends inside the last ball: an open curve adds its endpoint, a
  // closed one returns to the first center along a short arc.
  // Either way one center more than the full arcs, hence the slack.
  const Point2 last = p.closed() ? p[0] : p[p.size() - 1];
  if (p.closed()) {
    if (distance(out.centers.back(), last) <= kTauGeo && out.centers.size() > 1) out.centers.pop_back();
    else out.slack = 1;
  } else {
    if (distance(out.centers.back(), last) > kTauGeo) out.centers.push_back(last);
    out.slack = 1;
  }

  out.center_count = static_cast<int>(out.centers.size());
  out.h1_delta = 2.0 * eps * out.center_count;
  out.count_bound = static_cast<int>(std::ceil(2.0 * L / eps - 1e-12));
  out.within_bound = out.center_count <= out.count_bound + out.slack;
  return out;
}

AnnulusCheck check_annulus(const AnnulusState& st) {
  const Polyline& in = st.inner.curve;
  const Polyline& out = st.outer.curve;
  if (!in.closed() || !out.closed()) fail(ErrorKind::InvalidState, "annulus boundaries must be closed");
  AnnulusCheck c;
  c.gap = polyline_distance(in, out);
  if (c.gap <= kTauGeo) {
    if (hausdorff_distance(in, out, 1e-9) <= 10.0 * kTauGeo) {
      c.degenerate = true;
      return c;
    }
    fail(ErrorKind::InvalidState, "inner and outer boundaries touch");
  }
  // Disjoint closed curves: one vertex decides the nesting.
  if (point_in_region(out, in[0]) != Containment::Inside)
    fail(ErrorKind::InvalidState, "inner curve is not inside the outer region");
  c.area = enclosed_area(out) - enclosed_area(in);
  if (!(c.area > 0.0)) fail(ErrorKind::InvalidState, "outer region does not contain the inner one");
  return c;
}

double annulus_area(const AnnulusState& st) { return check_annulus(st).area; }

AnnulusState make_annulus(FlowState inner, FlowState outer) {
  AnnulusState st{std::move(inner), std::move(outer), 0.0};
  st.area = annulus_area(st);
  return st;
}

LevelsetReport levelset_snapshot(const TSCSpec& tsc, const ApproxSpec& spec, int N, double t,
                                 const LevelsetOptions& opt) {
  if (N < 2) fail(ErrorKind::InvalidInput, "N must be at least 2");
  if (!(t > 0.0)) fail(ErrorKind::InvalidInput, "t must be positive");
  if (!(opt.probe_eps > 0.0)) fail(ErrorKind::InvalidInput, "probe_eps must be positive");
  opt.flow.validate();

  const ApproxFamily fam = make_family(tsc, spec, N);
  std::vector<FlowState> init;
  init.reserve(2 * N);
  for (int k = 0; k < N; ++k) {
    init.push_back(make_flow_state(fam.inner[k], opt.mesh_h, opt.flow));
    init.push_back(make_flow_state(fam.outer[k], opt.mesh_h, opt.flow));
  }
  const std::vector<FlowOutcome> evolved = evolve_family(init, t, opt.flow);

  LevelsetReport rep;
  rep.t = t;
  rep.N = N;
  rep.probes = opt.probes;
  rep.probe_eps = opt.probe_eps;
  for (int k = 0; k < N; ++k) {
    const int n = k + 1;
    const FlowOutcome& gi = evolved[2 * k];
    const FlowOutcome& go = evolved[2 * k + 1];
    if (gi.extinct_at || go.extinct_at) {
      const double te = gi.extinct_at ? *gi.extinct_at : *go.extinct_at;
      rep.dropped.emplace_back(n, "extinct at t=" + std::to_string(te));
      continue;
    }
    LevelsetRow row;
    row.n = n;
    try {
      row.area0 = annulus_area({init[2 * k], init[2 * k + 1], 0.0});
      AnnulusState now = make_annulus(gi.state, go.state);
      row.area = now.area;
      rep.innermost = std::move(now);
    } catch (const Error& e) {
      rep.dropped.emplace_back(n, e.what());
      continue;
    }
    row.dH0 = hausdorff_distance(init[2 * k].curve, init[2 * k + 1].curve, 1e-7);
    row.dH = hausdorff_distance(gi.state.curve, go.state.curve, 1e-7);
    for (const Point2& q : opt.probes) {
      double len = 0.0;
      for (const auto& piece : restrict_to_ball(gi.state.curve, Ball(q, opt.probe_eps))) len += polyline_length(piece);
      row.local_lengths.push_back(len);
    }
    for (std::size_t i = 0; i < gi.state.curve.size(); ++i)
      row.kappa_max = std::max(row.kappa_max, norm(curvature_vector(gi.state, i)));
    row.inner_vertices = gi.state.curve.size();
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

nlohmann::json to_json(const CoverEstimate& c) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& q : c.centers) centers.push_back({q.x, q.y});
  return {{"delta", c.delta},       {"center_count", c.center_count}, {"h1_delta", c.h1_delta},
          {"length", c.length},     {"count_bound", c.count_bound},   {"slack", c.slack},
          {"within_bound", c.within_bound}, {"centers", centers}};
}

nlohmann::json to_json(const LevelsetReport& r) {
  auto probe_key = [](Point2 q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%g,%g)", q.x, q.y);
    return std::string(buf);
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json ll = nlohmann::json::object();
    for (std::size_t i = 0; i < r.probes.size(); ++i) ll[probe_key(r.probes[i])] = row.local_lengths[i];
    rows.push_back({{"n", row.n},
                    {"area", row.area},
                    {"area0", row.area0},
                    {"dH", row.dH},
                    {"dH0", row.dH0},
                    {"local_lengths", ll},
                    {"kappa_max", row.kappa_max},
                    {"inner_vertices", row.inner_vertices}});
  }
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& [n, why] : r.dropped) dropped.push_back({{"n", n}, {"reason", why}});
  nlohmann::json j{{"t", r.t}, {"N", r.N}, {"probe_eps", r.probe_eps}, {"rows", rows}, {"dropped", dropped}};
  if (!r.rows.empty()) j["innermost_n"] = r.rows.back().n;
  return j;
}

}  // namespace sineflow
