#include "sineflow/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sineflow/bounds.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/intersections.hpp"

namespace sineflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxWitnesses = 5;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Gaussian random walk of n steps with the given step scale, shifted by origin.
Polyline random_walk(Rng& rng, int n, double scale, Point2 origin) {
  std::normal_distribution<double> step(0.0, scale);
  std::vector<Point2> pts{origin};
  for (int k = 0; k < n; ++k) pts.push_back(pts.back() + Vec2{step(rng), step(rng)});
  return make_polyline_dedup(pts, false);
}

double line_V_distance(const LineSpec& l) {
  const double s0 = l.signed_distance({0.0, -1.0}), s1 = l.signed_distance({0.0, 1.0});
  if (s0 * s1 <= 0.0) return 0.0;
  return std::min(std::abs(s0), std::abs(s1));
}

Polyline ellipse(double a, double b, int n) {
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * kPi * k / n;
    pts.push_back({a * std::cos(s), b * std::sin(s)});
  }
  return Polyline(pts, true);
}

// Star-shaped closed curve r(s) = radius(s) around c.
template <typename F>
Polyline star(Point2 c, int n, F&& radius) {
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * kPi * k / n;
    const double r = radius(s);
    pts.push_back({c.x + r * std::cos(s), c.y + r * std::sin(s)});
  }
  return Polyline(pts, true);
}

void add_witness(nlohmann::json& list, nlohmann::json w) {
  if (list.size() < kMaxWitnesses) list.push_back(std::move(w));
}

}  // namespace

VerifyResult verify_intersect_lemma(std::span<const double> c_grid, std::span<const double> lambda_grid) {
  VerifyResult r{"intersect-lemma", true, {}};
  nlohmann::json rows = nlohmann::json::array(), failures = nlohmann::json::array();
  for (double c : c_grid) {
    for (double lam : lambda_grid) {
      const GrimReaperSpec s{c, lam};
      const auto cert = lemma_intersect_certificate(s);
      const auto u = sample_grim_reaper(s, 0.0, -2.0, 0.002);
      const Polyline gamma(sample_sine_graph(std::min(cert.x1, 1.0) / 2.0, 1.0, 0.0, 1e-9, 1u << 22), false);
      const auto k = count_crossings(u, gamma);
      const bool ok = cert.passes && k.count == 1 && !k.uncertain;
      nlohmann::json row{{"c", c},           {"lambda", lam},    {"certificate", cert.passes},
                         {"x1", cert.x1},    {"x2", cert.x2},    {"within_gamma", cert.within_gamma},
                         {"crossings", k.count}, {"uncertain", k.uncertain}, {"pass", ok}};
      if (!ok) {
        r.pass = false;
        failures.push_back(row);
      }
      rows.push_back(std::move(row));
    }
  }
  r.detail = {{"cases", rows.size()}, {"failures", failures.size()}, {"rows", rows}};
  if (!failures.empty()) r.detail["witness"] = failures.front();
  return r;
}

VerifyResult verify_straight2(std::uint64_t seed, int trials) {
  Rng rng(seed);
  std::uniform_int_distribution<int> count(1, 25);
  int violations = 0, m_mismatch = 0;
  nlohmann::json witnesses = nlohmann::json::array();
  for (int trial = 0; trial < trials; ++trial) {
    IntervalFamily fam;
    fam.L = uniform(rng, 0.5, 5.0);
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      double a = uniform(rng, 0.0, fam.L), b = uniform(rng, 0.0, fam.L);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-9) b = std::min(fam.L, a + 1e-3);
      fam.intervals.emplace_back(a, b);
    }
    const auto b = interval_sum_bound(fam);
    // Closed intervals attain their maximum overlap at a left endpoint.
    int oracle = 0;
    for (const auto& [lo, hi] : fam.intervals) oracle = std::max(oracle, multiplicity(fam, lo));
    if (!b.holds || b.total > oracle * fam.L * (1.0 + 1e-12)) {
      ++violations;
      add_witness(witnesses, {{"trial", trial}, {"L", fam.L}, {"intervals", fam.intervals}, {"bound", to_json(b)}});
    }
    if (b.M != oracle) ++m_mismatch;
  }
  return {"straight2",
          violations == 0 && m_mismatch == 0,
          {{"trials", trials}, {"violations", violations}, {"M_mismatches", m_mismatch}, {"witnesses", witnesses}}};
}

VerifyResult verify_straight(std::uint64_t seed, int trials) {
  Rng rng(seed);
  int violations = 0, nonempty = 0, max_M = 0;
  nlohmann::json witnesses = nlohmann::json::array();
  for (int trial = 0; trial < trials; ++trial) {
    const double eps = uniform(rng, 0.05, 0.5);
    const Polyline p = random_walk(rng, 60, 0.25 * eps, {uniform(rng, -eps, eps), uniform(rng, -eps, eps)});
    const auto clipped = restrict_to_box(p, Box::centered({0.0, 0.0}, eps));
    if (clipped.empty()) continue;
    ++nonempty;
    const int M = std::max(1, measure_grid_crossings(clipped).first);
    max_M = std::max(max_M, M);
    const auto b = grid_length_bound(clipped, eps, M);
    if (!b.holds) {
      ++violations;
      add_witness(witnesses, {{"trial", trial}, {"eps", eps}, {"bound", to_json(b)}});
    }
  }
  return {"straight",
          violations == 0,
          {{"trials", trials}, {"nonempty", nonempty}, {"max_M", max_M}, {"violations", violations},
           {"witnesses", witnesses}}};
}

VerifyResult verify_jacobian(std::uint64_t seed, int trials) {
  Rng rng(seed);
  int violations = 0, shear_cases = 0, flatten_cases = 0;
  nlohmann::json witnesses = nlohmann::json::array();
  auto check = [&](const DiffMap& map, double eps, const Polyline& p, int trial) {
    const auto clipped = restrict_to_ball(p, Ball({0.0, 0.0}, eps));
    if (clipped.empty()) return false;
    std::vector<Polyline> image;
    for (const auto& q : clipped) image.push_back(transform(q, map.forward));
    const int M = std::max(1, measure_grid_crossings(image).first);
    const auto b = transformed_length_bound(clipped, map, eps, M);
    if (!b.holds) {
      ++violations;
      add_witness(witnesses, {{"trial", trial}, {"map", map.name}, {"eps", eps}, {"d", map.jac_norm_hi},
                              {"bound", to_json(b)}});
    }
    return true;
  };
  const int half = trials / 2;
  for (int trial = 0; trial < half; ++trial) {
    const double theta = kPi / 32.0 * (1 + trial % 15);
    const double eps = uniform(rng, 0.05, 0.5);
    const auto map = build_shear(theta);
    shear_cases += check(map, eps, random_walk(rng, 60, 0.25 * eps, {0.0, 0.0}), trial);
  }
  const double alpha = 0.1;
  for (int trial = half; trial < trials; ++trial) {
    const double c = std::exp(uniform(rng, std::log(2.0), std::log(300.0)));
    const GrimReaperSpec g{c, uniform(rng, 0.0, 6.0)};
    const double t = uniform(rng, 0.0, 0.05);
    const double eps = std::atan(alpha) / c;
    const auto map = build_flatten(g, t, -eps, eps, alpha);
    flatten_cases += check(map, eps, random_walk(rng, 60, 0.25 * eps, {0.0, 0.0}), trial);
  }
  return {"jacobian",
          violations == 0,
          {{"trials", trials}, {"shear_cases", shear_cases}, {"flatten_cases", flatten_cases},
           {"violations", violations}, {"witnesses", witnesses}}};
}

VerifyResult verify_intbound(const TSCSpec& tsc, const ApproxSpec& spec, int n_max, std::uint64_t seed, int lines,
                             double min_distance) {
  if (n_max < 1) fail(ErrorKind::InvalidInput, "n_max must be positive");
  Rng rng(seed);
  const Polyline T = generate_tsc(tsc);
  const int n_from = (n_max + 1) / 2;
  std::vector<Polyline> gammas;
  for (int n = n_from; n <= n_max; ++n) gammas.push_back(generate_inner_approx(tsc, spec, n));
  int violations = 0, uncertain = 0, max_T = 0;
  nlohmann::json witnesses = nlohmann::json::array();
  for (int i = 0; i < lines; ++i) {
    const double phi = uniform(rng, 0.0, kPi);
    const LineSpec l({uniform(rng, -0.5, 1.5), uniform(rng, -2.5, 1.5)}, {std::cos(phi), std::sin(phi)});
    if (line_V_distance(l) < min_distance) {
      --i;
      continue;
    }
    const auto kT = count_line_crossings(T, l);
    max_T = std::max(max_T, kT.count);
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      const auto kg = count_line_crossings(gammas[j], l);
      if (kT.uncertain || kg.uncertain) {
        ++uncertain;
        continue;
      }
      if (kg.count > 2 * kT.count) {
        ++violations;
        add_witness(witnesses, {{"n", n_from + static_cast<int>(j)}, {"base", {l.base.x, l.base.y}},
                                {"direction", {l.direction.x, l.direction.y}}, {"gamma", kg.count}, {"T", kT.count}});
      }
    }
  }
  return {"intbound",
          violations == 0,
          {{"lines", lines}, {"n_from", n_from}, {"n_max", n_max}, {"min_distance", min_distance},
           {"max_T_crossings", max_T}, {"uncertain", uncertain}, {"violations", violations},
           {"witnesses", witnesses}}};
}

VerifyResult verify_area_law(double mesh_h, double dt, double tol) {
  const std::vector<std::pair<std::string, Polyline>> curves{
      {"circle", sample_circle(1.0, 0.0, 2000)},
      {"ellipse", ellipse(1.5, 0.75, 2000)},
      {"gamma_3", generate_inner_approx(TSCSpec::standard(3), ApproxSpec{}, 3)}};
  const FlowParams prm;
  VerifyResult r{"area-law", true, {}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [name, c] : curves) {
    const FlowState s = make_flow_state(c, mesh_h, prm);
    const double a0 = enclosed_area(s.curve);
    const FlowState e = evolve_to(s, dt, prm);
    const double rate = (enclosed_area(e.curve) - a0) / dt;
    const double rel = std::abs(rate + 2.0 * kPi) / (2.0 * kPi);
    const bool ok = rel <= tol;
    r.pass = r.pass && ok;
    rows.push_back({{"curve", name}, {"area0", a0}, {"rate", rate}, {"rel_error", rel}, {"pass", ok}});
  }
  r.detail = {{"mesh_h", mesh_h}, {"dt", dt}, {"tol", tol}, {"rows", rows}};
  return r;
}

VerifyResult verify_avoidance(std::uint64_t seed, int pairs, double mesh_h, int checkpoints) {
  Rng rng(seed);
  const FlowParams prm;
  int violations = 0;
  double min_gap = INFINITY;
  nlohmann::json witnesses = nlohmann::json::array();
  for (int pair = 0; pair < pairs; ++pair) {
    std::array<double, 3> ao{}, ai{}, po{}, pi{};
    const double R = uniform(rng, 0.6, 1.2), s = uniform(rng, 0.45, 0.8);
    for (int k = 0; k < 3; ++k) {
      ao[k] = uniform(rng, -0.08, 0.08);
      ai[k] = uniform(rng, -0.06, 0.06);
      po[k] = uniform(rng, 0.0, 2.0 * kPi);
      pi[k] = uniform(rng, 0.0, 2.0 * kPi);
    }
    auto ro = [&](double th) {
      double r = 1.0;
      for (int k = 0; k < 3; ++k) r += ao[k] * std::cos((k + 2) * th + po[k]);
      return R * r;
    };
    auto ri = [&](double th) {
      double r = s;
      for (int k = 0; k < 3; ++k) r += ai[k] * std::cos((k + 3) * th + pi[k]);
      return R * r;
    };
    const Point2 c{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    const Polyline outer = star(c, 1000, ro), inner = star(c, 1000, ri);
    const double gap0 = polyline_distance(inner, outer);
    // Stop well before the inner curve would vanish.
    const double t_end = std::min(0.1, 0.5 * enclosed_area(inner) / (2.0 * kPi));
    std::vector<double> times;
    for (int k = 1; k <= checkpoints; ++k) times.push_back(t_end * k / checkpoints);
    const auto si = evolve_snapshots(make_flow_state(inner, mesh_h, prm), times, prm);
    const auto so = evolve_snapshots(make_flow_state(outer, mesh_h, prm), times, prm);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double gap = polyline_distance(si[k].curve, so[k].curve);
      const bool inside = point_in_region(so[k].curve, si[k].curve[0]) == Containment::Inside;
      min_gap = std::min(min_gap, gap);
      if (gap <= kTauGeo || !inside) {
        ++violations;
        add_witness(witnesses, {{"pair", pair}, {"t", times[k]}, {"gap", gap}, {"gap0", gap0}, {"inside", inside}});
        break;
      }
    }
  }
  return {"avoidance",
          violations == 0,
          {{"pairs", pairs}, {"mesh_h", mesh_h}, {"checkpoints", checkpoints}, {"min_gap", min_gap},
           {"violations", violations}, {"witnesses", witnesses}}};
}

nlohmann::json to_json(const VerifyResult& r) {
  return {{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace sineflow
