#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sineflow/error.hpp"
#include "sineflow/measure.hpp"

using namespace sineflow;

namespace {

constexpr double kPi = std::numbers::pi;

Polyline ellipse(double a, double b, int n, Point2 c = {0.0, 0.0}) {
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * kPi * k / n;
    pts.push_back({c.x + a * std::cos(s), c.y + b * std::sin(s)});
  }
  return Polyline(pts, true);
}

// Greedy first-exit count on a dense resample of p.
int dense_walk_count(const Polyline& p, double eps, double step) {
  std::vector<Point2> dense;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const int k = std::max(1, static_cast<int>(std::ceil(distance(a, b) / step)));
    for (int j = 0; j < k; ++j) dense.push_back(a + (static_cast<double>(j) / k) * (b - a));
  }
  if (!p.closed()) dense.push_back(p[p.size() - 1]);
  int count = 1;
  Point2 c = dense.front();
  for (const auto& q : dense) {
    if (distance(q, c) >= 0.5 * eps) {
      c = q;
      ++count;
    }
  }
  if (!p.closed() && distance(c, dense.back()) > 0.0) ++count;
  return count;
}

// Arclength of the point of p closest to q.
double arc_position(const Polyline& p, Point2 q) {
  double best = INFINITY, pos = 0.0, run = 0.0;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const double l = distance(a, b);
    const double d = point_segment_distance(q, a, b);
    if (d < best) {
      best = d;
      pos = run + distance(a, closest_point_on_segment(q, a, b));
    }
    run += l;
  }
  return pos;
}

// Every point of the curve lies within eps/2 of the center that starts its arc.
bool arcs_in_balls(const Polyline& p, const CoverEstimate& cov, double step) {
  std::vector<double> at;
  for (const auto& c : cov.centers) at.push_back(arc_position(p, c));
  double run = 0.0;
  std::size_t k = 0;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const double l = distance(a, b);
    const int m = std::max(1, static_cast<int>(std::ceil(l / step)));
    for (int j = 0; j <= m; ++j) {
      const double s = run + l * j / m;
      while (k + 1 < at.size() && at[k + 1] <= s) ++k;
      const Point2 q = a + (static_cast<double>(j) / m) * (b - a);
      if (distance(q, cov.centers[k]) > 0.5 * cov.delta + 1e-9) return false;
    }
    run += l;
  }
  return true;
}

}  // namespace

TEST(Cover, StraightSegment) {
  for (double L : {1.0, 2.5, 3.7}) {
    for (double eps : {0.1, 0.3, 0.05}) {
      const Polyline seg({{0.0, 0.0}, {L, 0.0}}, false);
      const auto cov = h1_cover_points(seg, eps);
      const int ref = static_cast<int>(std::ceil(2.0 * L / eps));
      EXPECT_LE(std::abs(cov.center_count - ref), 1) << L << " " << eps;
      EXPECT_LE(cov.h1_delta, 4.0 * L + 1.0);
      EXPECT_TRUE(cov.within_bound);
      for (std::size_t i = 0; i + 2 < cov.centers.size(); ++i)
        EXPECT_NEAR(distance(cov.centers[i], cov.centers[i + 1]), 0.5 * eps, 1e-12);
    }
  }
}

TEST(Cover, CircleEstimateRange) {
  const Polyline c = sample_circle(1.0, 0.0, 2000);
  const auto cov = h1_cover_points(c, 0.1);
  const double L = polyline_length(c);
  EXPECT_GE(cov.h1_delta, 2.0 * kPi - 0.2);
  EXPECT_LE(cov.h1_delta, 4.0 * L + 1.0);
  EXPECT_TRUE(cov.within_bound);
  EXPECT_EQ(cov.centers.front(), c[0]);
}

TEST(Cover, RejectsLargeEps) {
  const Polyline seg({{0.0, 0.0}, {1.0, 0.0}}, false);
  EXPECT_THROW(h1_cover_points(seg, 1.0), Error);
  EXPECT_THROW(h1_cover_points(seg, 0.0), Error);
}

TEST(Cover, MatchesDenseWalkAndContainsArcs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Point2> pts{{0.0, 0.0}};
    for (int k = 0; k < 30; ++k) pts.push_back(pts.back() + Point2{0.3 + 0.2 * U(rng), 0.3 * U(rng)});
    const Polyline p = make_polyline_dedup(pts, false);
    const double eps = 0.05 + 0.1 * (U(rng) + 1.0);
    const auto cov = h1_cover_points(p, eps);
    EXPECT_LE(std::abs(cov.center_count - dense_walk_count(p, eps, 1e-4)), 1);
    EXPECT_TRUE(arcs_in_balls(p, cov, 1e-3));
    EXPECT_TRUE(cov.within_bound);
    EXPECT_GE(cov.h1_delta, cov.length - 2.0 * eps * cov.slack);
  }
}

TEST(Cover, ClosedCurveArcs) {
  const Polyline e = ellipse(2.0, 0.5, 400);
  const auto cov = h1_cover_points(e, 0.07);
  EXPECT_TRUE(arcs_in_balls(e, cov, 1e-3));
  EXPECT_LE(std::abs(cov.center_count - dense_walk_count(e, 0.07, 1e-4)), 1);
  EXPECT_LT(cov.h1_delta, 4.0 * cov.length + 1.0);
}

TEST(Annulus, ConcentricCircles) {
  const int n = 1000;
  AnnulusState st{{sample_circle(1.0, 0.0, n), 0.0, 0.01}, {sample_circle(2.0, 0.0, n), 0.0, 0.01}, 0.0};
  const double poly = 0.5 * n * std::sin(2.0 * kPi / n) * (4.0 - 1.0);
  EXPECT_NEAR(annulus_area(st), poly, 1e-12);
  EXPECT_NEAR(annulus_area(st), 3.0 * kPi, 1e-4);
}

TEST(Annulus, EqualCurvesAreDegenerate) {
  const Polyline c = sample_circle(1.0, 0.0, 200);
  const auto chk = check_annulus({{c, 0.0, 0.01}, {c, 0.0, 0.01}, 0.0});
  EXPECT_TRUE(chk.degenerate);
  EXPECT_EQ(chk.area, 0.0);
}

TEST(Annulus, NestingViolations) {
  const Polyline small = sample_circle(1.0, 0.0, 200), big = sample_circle(2.0, 0.0, 200);
  auto kind = [](const AnnulusState& st) {
    try {
      annulus_area(st);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidInput;
  };
  EXPECT_EQ(kind({{big, 0.0, 0.01}, {small, 0.0, 0.01}, 0.0}), ErrorKind::InvalidState);
  EXPECT_EQ(kind({{ellipse(3.0, 0.5, 300), 0.0, 0.01}, {big, 0.0, 0.01}, 0.0}), ErrorKind::InvalidState);
  EXPECT_EQ(kind({{ellipse(0.5, 0.5, 300, {5.0, 0.0}), 0.0, 0.01}, {big, 0.0, 0.01}, 0.0}), ErrorKind::InvalidState);
}

TEST(Annulus, ConservedUnderFlow) {
  FlowParams prm;
  prm.turning_correction = true;
  const double h = 0.005;
  std::vector<FlowState> init{make_flow_state(ellipse(1.0, 0.6, 600), h, prm),
                              make_flow_state(ellipse(1.4, 1.0, 600, {0.1, 0.0}), h, prm)};
  const double a0 = annulus_area({init[0], init[1], 0.0});
  const auto out = evolve_family(init, 0.05, prm);
  ASSERT_FALSE(out[0].extinct_at);
  ASSERT_FALSE(out[1].extinct_at);
  const double a1 = annulus_area({out[0].state, out[1].state, 0.0});
  EXPECT_LE(std::abs(a1 - a0), 0.02 * a0);
}

TEST(Levelset, Validation) {
  const auto tsc = TSCSpec::standard(2);
  EXPECT_THROW(levelset_snapshot(tsc, ApproxSpec{}, 1, 0.01), Error);
  EXPECT_THROW(levelset_snapshot(tsc, ApproxSpec{}, 2, 0.0), Error);
}

TEST(Levelset, SmallSnapshot) {
  const int N = 3;
  const ApproxSpec spec;
  LevelsetOptions opt;
  opt.mesh_h = 0.02;
  const auto rep = levelset_snapshot(TSCSpec::standard(N), spec, N, 0.005, opt);
  ASSERT_EQ(rep.rows.size(), static_cast<std::size_t>(N));
  EXPECT_TRUE(rep.dropped.empty());
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    EXPECT_EQ(r.n, static_cast<int>(k) + 1);
    EXPECT_LE(std::abs(r.area - r.area0), 0.02 * r.area0);
    EXPECT_LE(r.dH0, 4.0 * (spec.delta(r.n) + spec.a(r.n)));
    EXPECT_EQ(r.local_lengths.size(), opt.probes.size());
    if (k > 0) EXPECT_LT(r.area, rep.rows[k - 1].area);
  }
  ASSERT_TRUE(rep.innermost);
  const auto j = to_json(rep);
  EXPECT_EQ(j["N"], N);
  EXPECT_EQ(j["rows"].size(), static_cast<std::size_t>(N));
  EXPECT_TRUE(j["rows"][0]["local_lengths"].contains("(0,0)"));
  EXPECT_EQ(j["innermost_n"], N);
}
