// Acceptance suite: one PASS/FAIL line per criterion, with timings.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sineflow/bounds.hpp"
#include "sineflow/curves.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/intersections.hpp"
#include "sineflow/io.hpp"
#include "sineflow/measure.hpp"
#include "sineflow/verify.hpp"

using namespace sineflow;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string summary;
  json detail = json::object();
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<FlowState> evolve_all(const std::vector<Polyline>& curves, double t, double mesh_h,
                                  const FlowParams& prm) {
  std::vector<FlowState> init;
  for (const auto& c : curves) init.push_back(make_flow_state(c, mesh_h, prm));
  std::vector<FlowState> out;
  for (auto& o : evolve_family(init, t, prm)) {
    if (o.extinct_at) fail(ErrorKind::Extinct, fmt("curve extinct at t=%g", *o.extinct_at));
    out.push_back(std::move(o.state));
  }
  return out;
}

Outcome exact_solutions() {
  const FlowParams prm;
  Stopwatch w1;
  const FlowState c = evolve_to(make_flow_state(sample_circle(1.0, 0.0, 4096), 0.01, prm), 0.375, prm);
  double lo = INFINITY, hi = 0.0;
  for (const auto& v : c.curve.vertices()) {
    lo = std::min(lo, norm(v));
    hi = std::max(hi, norm(v));
  }
  const double t_circle = w1.seconds();

  Stopwatch w2;
  const GrimReaperSpec g{2.0, 0.0};
  const FlowState r = evolve_to(make_flow_state(sample_grim_reaper(g, 0.0, -4.0, 0.002), 0.01, prm), 1.0, prm);
  // The sample has fixed endpoints at y = -4; compare on the central 90% of the strip.
  const double window = 0.9 * kPi / (2.0 * g.c);
  double err = 0.0;
  for (const auto& v : r.curve.vertices())
    if (std::abs(v.x) < window) err = std::max(err, std::abs(v.y - eval_grim_reaper(g, v.x, 1.0)));
  const double t_reaper = w2.seconds();

  Outcome o;
  o.pass = std::abs(lo - 0.5) <= 5e-3 && std::abs(hi - 0.5) <= 5e-3 && err < 1e-2 && t_circle < 10.0 &&
           t_reaper < 10.0;
  o.summary = fmt("circle radius in [%.5f, %.5f] (%.1f s); reaper sup error %.2e on |x| < %.3f (%.1f s)", lo, hi,
                  t_circle, err, window, t_reaper);
  o.detail = {{"radius_lo", lo}, {"radius_hi", hi}, {"circle_s", t_circle}, {"reaper_sup_error", err},
              {"reaper_window", window}, {"reaper_s", t_reaper}};
  return o;
}

Outcome area_law() {
  const auto r = verify_area_law(0.005, 0.01, 0.02);
  Outcome o{r.pass, "", r.detail};
  for (const auto& row : r.detail["rows"])
    o.summary += fmt("%s rate %.4f (%.2f%%); ", row["curve"].get<std::string>().c_str(), row["rate"].get<double>(),
                     100.0 * row["rel_error"].get<double>());
  o.summary += "target -2pi = -6.2832, tolerance 2%";
  return o;
}

Outcome intersect_grid() {
  const std::vector<double> cs{1.1, 1.5, 2.0, 4.0, 8.0}, lams{0, 1, 2, 3, 4, 5, 6};
  const auto r = verify_intersect_lemma(cs, lams);
  Outcome o{r.pass, "", r.detail};
  int cert = 0;
  std::set<double> failing_c;
  for (const auto& row : r.detail["rows"]) {
    cert += row["certificate"].get<bool>();
    if (!row["pass"].get<bool>()) failing_c.insert(row["c"].get<double>());
  }
  o.summary = fmt("certificate passes %d/35, crossing count 1 in %d/35", cert,
                  35 - r.detail["failures"].get<int>());
  if (!failing_c.empty()) {
    o.summary += "; count 0 for c in {";
    bool first = true;
    for (double c : failing_c) {
      o.summary += (first ? "" : ", ") + fmt("%g", c);
      first = false;
    }
    o.summary += "} where the crossing abscissa lies beyond x = 1";
  }
  return o;
}

Outcome straight2() {
  const auto r = verify_straight2(kSeed, 10000);
  return {r.pass, fmt("%d families, %d violations of sum L(I) <= M L", 10000, r.detail["violations"].get<int>()),
          r.detail};
}

Outcome straight_and_jacobian() {
  const auto a = verify_straight(kSeed, 1000);
  const auto b = verify_jacobian(kSeed, 1000);
  return {a.pass && b.pass,
          fmt("grid: %d polylines, %d violations (max M %d); maps: %d shear + %d flatten, %d violations",
              a.detail["nonempty"].get<int>(), a.detail["violations"].get<int>(), a.detail["max_M"].get<int>(),
              b.detail["shear_cases"].get<int>(), b.detail["flatten_cases"].get<int>(),
              b.detail["violations"].get<int>()),
          {{"straight", a.detail}, {"jacobian", b.detail}}};
}

// Crossing counts of evolved curves against exact reapers u^lambda(., t).
json monitor_family(const std::vector<std::vector<FlowState>>& snaps, const std::vector<double>& times, double c,
                    int& violations, int& flagged, int& max_count) {
  json out = json::array();
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    for (int lam = 0; lam <= 6; ++lam) {
      const GrimReaperSpec g{c, static_cast<double>(lam)};
      const double h = std::min(0.01, 0.1 / c);
      PairProvider pairs = [&](double t) {
        const std::size_t i = std::lower_bound(times.begin(), times.end(), t) - times.begin();
        const double apex = 3.0 + lam - c * t;
        return std::make_pair(snaps[k][i].curve, sample_grim_reaper(g, t, std::min(-2.5, apex - 0.5), h));
      };
      const auto rep = monotonicity_monitor(times, pairs);
      std::vector<int> counts;
      for (const auto& s : rep.samples) {
        counts.push_back(s.count);
        flagged += s.uncertain;
        max_count = std::max(max_count, s.count);
      }
      violations += rep.violation;
      out.push_back({{"n", k + 1}, {"lambda", lam}, {"counts", counts}, {"violation", rep.violation}});
    }
  }
  return out;
}

Outcome intersection_monotonicity() {
  const double t0 = 0.02, c = 6.0 / t0;
  const int N = 6;
  const auto fam = make_family(TSCSpec::standard(N), ApproxSpec{}, N);
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(t0 * k / 20);
  const FlowParams prm;
  auto series = [&](const std::vector<Polyline>& curves) {
    std::vector<std::vector<FlowState>> out;
    for (const auto& p : curves) out.push_back(evolve_snapshots(make_flow_state(p, 0.01, prm), times, prm));
    return out;
  };
  const auto inner = series(fam.inner);
  const auto outer = series(fam.outer);

  int v1 = 0, f1 = 0, m1 = 0, v2 = 0, f2 = 0, m2 = 0, v3 = 0, f3 = 0, m3 = 0;
  json d1 = monitor_family(inner, times, c, v1, f1, m1);
  json d2 = monitor_family(inner, times, 2.0, v2, f2, m2);
  json d3 = monitor_family(outer, times, c, v3, f3, m3);
  Outcome o;
  o.pass = v1 == 0 && v2 == 0 && v3 == 0;
  o.summary = fmt("gamma_n vs u (c=%g): %d violations, max count %d; supplementary gamma_n vs c=2 reapers: %d "
                  "violations, max count %d; beta_n vs c=%g: %d violations, max count %d; %d flagged samples",
                  c, v1, m1, v2, m2, c, v3, m3, f1 + f2 + f3);
  o.detail = {{"times", times}, {"gamma_c300", d1}, {"gamma_c2", d2}, {"beta_c300", d3}};
  return o;
}

Outcome tsc_experiment() {
  const int N = 8;
  const double t0 = 0.02;
  const Point2 x{0.0, 0.0};
  const auto fam = make_family(TSCSpec::standard(N), ApproxSpec{}, N);
  const FlowParams prm;
  const Case2Setup s = case2_recipe(fam, t0, 0.1);

  std::vector<FlowOutcome> init, evolved;
  std::vector<FlowState> states;
  for (const auto& g : fam.inner) states.push_back(make_flow_state(g, 0.01, prm));
  for (const auto& st : states) init.push_back({st, std::nullopt});
  evolved = evolve_family(states, t0, prm);

  auto lengths = [](const LocalLengthTable& t) {
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(r.length);
    return v;
  };
  auto within = [](double a, double b, double tol) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 || std::abs(a - b) <= tol * m;
  };
  auto stable3 = [&](const std::vector<double>& v) {
    const std::size_t n = v.size();
    return within(v[n - 1], v[n - 2], 0.1) && within(v[n - 1], v[n - 3], 0.1) && within(v[n - 2], v[n - 3], 0.1);
  };
  const double cw = std::max(s.C, s.omega);

  // At the recipe window the curves do not reach the ball.
  const auto at_recipe = local_length_table(evolved, 1, x, t0, s.eps, 4.0 * cw * s.eps);

  // Probe radius: smallest on the grid for which every evolved curve meets the ball.
  json scan = json::array();
  double eps = 0.0;
  for (double e : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto tab = local_length_table(evolved, 1, x, t0, e, 4.0 * cw * e);
    const auto v = lengths(tab);
    scan.push_back({{"eps", e}, {"lengths_t0", v}, {"stable", stable3(v)}});
    if (eps == 0.0 && *std::min_element(v.begin(), v.end()) > 0.0) eps = e;
  }
  if (eps == 0.0) fail(ErrorKind::ResolutionError, "no probe radius meets every evolved curve");
  const auto probe = local_length_table(evolved, 1, x, t0, eps, 4.0 * cw * eps);
  const auto start = local_length_table(init, 1, x, 0.0, eps, 4.0 * cw * eps);
  const auto v0 = lengths(start), v1 = lengths(probe);
  bool growing = true;
  for (std::size_t k = 1; k < v0.size(); ++k) growing = growing && v0[k] > v0[k - 1];
  const bool t0_unstable = !stable3(v0);

  Outcome o;
  o.pass = at_recipe.holds && probe.holds && stable3(v1) && growing && t0_unstable;
  o.summary = fmt("recipe eps=%.3g (C=%d, omega=%d): sup %.3g <= %.3g; probe eps=%.2f: sup %.4f <= "
                  "4max{C,omega}eps=%.3f, n=6..8 lengths %.4f %.4f %.4f; t=0 lengths %.3f..%.3f increasing",
                  s.eps, s.C, s.omega, at_recipe.sup, at_recipe.bound, eps, probe.sup, probe.bound, v1[5], v1[6],
                  v1[7], v0.front(), v0.back());
  o.detail = {{"recipe", to_json(s)},
              {"recipe_table", to_json(at_recipe)},
              {"probe_eps", eps},
              {"probe_table", to_json(probe)},
              {"t0_lengths", v1},
              {"t_zero_lengths", v0},
              {"bound_paper_C4", 16.0 * eps},
              {"scan", scan}};
  return o;
}

Outcome annulus() {
  const int N = 6;
  const auto tsc = TSCSpec::standard(N);
  const LevelsetOptions opt;
  const auto r02 = levelset_snapshot(tsc, ApproxSpec{}, N, 0.02, opt);
  const auto r05 = levelset_snapshot(tsc, ApproxSpec{}, N, 0.05, opt);
  double worst = 0.0;
  for (const auto* rep : {&r02, &r05})
    for (const auto& row : rep->rows) worst = std::max(worst, std::abs(row.area - row.area0) / row.area0);
  bool decreasing = r02.rows.size() == static_cast<std::size_t>(N);
  std::string dh;
  for (std::size_t k = 1; k < r02.rows.size(); ++k) {
    dh += fmt("%.4f ", r02.rows[k].dH);
    if (k > 1) decreasing = decreasing && r02.rows[k].dH < r02.rows[k - 1].dH;
  }
  Outcome o;
  o.pass = r02.dropped.empty() && r05.dropped.empty() && worst <= 0.02 && decreasing;
  o.summary = fmt("max relative area change %.3f%% over t in {0.02, 0.05}; d_H at t=0.02 for n=2..6: %s", 100.0 * worst,
                  dh.c_str());
  o.summary += decreasing ? "(strictly decreasing)" : "(not strictly decreasing)";
  o.detail = {{"t002", to_json(r02)}, {"t005", to_json(r05)}};
  return o;
}

Outcome covering() {
  const auto fam = make_family(TSCSpec::standard(6), ApproxSpec{}, 6);
  const FlowParams prm;
  const FlowState g6 = evolve_to(make_flow_state(fam.inner[5], 0.01, prm), 0.02, prm);
  // The length of (gamma_6)_t is at most the sup over n, so this is the stricter form.
  const double L = polyline_length(g6.curve);
  Outcome o;
  o.pass = true;
  json rows = json::array();
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    const auto cov = h1_cover_points(g6.curve, eps);
    const bool ok = cov.h1_delta < 4.0 * L + 1.0 && cov.within_bound;
    o.pass = o.pass && ok;
    rows.push_back({{"eps", eps}, {"count", cov.center_count}, {"count_bound", cov.count_bound},
                    {"slack", cov.slack}, {"h1_delta", cov.h1_delta}, {"pass", ok}});
    o.summary += fmt("eps=%g: %.3f; ", eps, cov.h1_delta);
  }
  o.summary += fmt("bound 4L+1 = %.3f with L = %.4f", 4.0 * L + 1.0, L);
  o.detail = {{"L", L}, {"rows", rows}};
  return o;
}

Outcome avoidance() {
  const auto r = verify_avoidance(kSeed, 50);
  return {r.pass,
          fmt("50 nested pairs, %d violations, min gap %.4f over all checkpoints", r.detail["violations"].get<int>(),
              r.detail["min_gap"].get<double>()),
          r.detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only, expect_fail;
  std::string json_path;
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  app.add_option("--expect-fail", expect_fail,
                 "Criteria known to fail; exit 0 when exactly these fail")
      ->delimiter(',');
  app.add_option("--json", json_path, "Write the full report here");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "exact solutions", 20.0, exact_solutions},
      {2, "area law", 30.0, area_law},
      {3, "intersection grid", 5.0, intersect_grid},
      {4, "interval sums", 5.0, straight2},
      {5, "grid and Jacobian bounds", 30.0, straight_and_jacobian},
      {6, "intersection monotonicity", 120.0, intersection_monotonicity},
      {7, "local length near V", 300.0, tsc_experiment},
      {8, "annulus conservation and convergence", 300.0, annulus},
      {9, "covering estimate", 5.0, covering},
      {10, "avoidance", 120.0, avoidance},
  };

  json report = json::array();
  std::set<int> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Stopwatch w;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), {}};
    }
    const double s = w.seconds();
    const bool in_time = s < c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) failed.insert(c.id);
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": " << o.summary
              << fmt(" (%.1f s, limit %.0f s%s)", s, c.limit_s, in_time ? "" : ", over limit") << std::endl;
    report.push_back({{"id", c.id}, {"title", c.title}, {"pass", pass}, {"seconds", s}, {"summary", o.summary},
                      {"detail", o.detail}});
  }
  if (!json_path.empty()) write_json_file(json_path, report);

  if (expect_fail.empty()) return failed.empty() ? 0 : 1;
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  if (failed == expected) return 0;
  std::cout << "failing set differs from --expect-fail" << std::endl;
  return 1;
}
