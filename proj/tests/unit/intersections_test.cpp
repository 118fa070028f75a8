#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sineflow/curves.hpp"
#include "sineflow/intersections.hpp"

using namespace sineflow;

namespace {

constexpr double kPi = std::numbers::pi;

Polyline segment(Point2 a, Point2 b) { return Polyline({a, b}, false); }

Polyline refine(const Polyline& p) {
  std::vector<Point2> out;
  for (std::size_t e = 0; e < p.edge_count(); ++e) {
    out.push_back(p.edge_start(e));
    out.push_back(0.5 * (p.edge_start(e) + p.edge_end(e)));
  }
  if (!p.closed()) out.push_back(p.vertices().back());
  return Polyline(out, p.closed());
}

// Random star-shaped closed polygon around c.
Polyline star(std::mt19937_64& rng, Point2 c, double r, int n) {
  std::uniform_real_distribution<double> u(0.5, 1.0);
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * kPi * k / n;
    const double rr = r * u(rng);
    pts.push_back({c.x + rr * std::cos(th), c.y + rr * std::sin(th)});
  }
  return Polyline(pts, true);
}

}  // namespace

TEST(CountCrossings, CircleVsLine) {
  const auto c = sample_circle(1.0, 0.0, 200);
  const auto k = count_crossings(c, segment({-2, 0.0123}, {2, 0.0123}));
  EXPECT_EQ(k.count, 2);
  EXPECT_FALSE(k.uncertain);
  EXPECT_EQ(count_line_crossings(c, LineSpec::horizontal(0.0123)).count, 2);
}

TEST(CountCrossings, DisjointIsZero) {
  const auto a = sample_circle(1.0, 0.0, 64);
  const auto b = transform(a, [](Point2 p) { return p + Vec2{5, 0}; });
  const auto k = count_crossings(a, b);
  EXPECT_EQ(k.count, 0);
  EXPECT_FALSE(k.uncertain);
}

TEST(CountCrossings, ThroughSharedVertex) {
  const Polyline a({{-1, -1}, {0, 0}, {1, 1}}, false);
  const Polyline b({{-1, 1}, {0, 0}, {1, -1}}, false);
  const auto k = count_crossings(a, b);
  EXPECT_EQ(k.count, 1);
  EXPECT_FALSE(k.uncertain);
}

TEST(CountCrossings, TouchAtVertexIsZeroAndUncertain) {
  const Polyline a({{-1, 1}, {0, 0}, {1, 1}}, false);
  const Polyline b({{-1, -1}, {0, 0}, {1, -1}}, false);
  const auto k = count_crossings(a, b);
  EXPECT_EQ(k.count, 0);
  EXPECT_TRUE(k.uncertain);
}

TEST(CountCrossings, ReflexWedgeClassification) {
  // b turns right at the apex; a passes through the apex from inside the reflex side.
  const Polyline b({{-1, 0}, {0, 0}, {0, -1}}, false);
  const Polyline cross_a({{-1, -1}, {0, 0}, {1, 1}}, false);
  EXPECT_EQ(count_crossings(cross_a, b).count, 1);
  const Polyline touch_a({{1, 0.5}, {0, 0}, {0.5, 1}}, false);
  EXPECT_EQ(count_crossings(touch_a, b).count, 0);
}

TEST(CountCrossings, CollinearOverlapUncertain) {
  const auto k = count_crossings(segment({0, 0}, {2, 0}), segment({1, 0}, {3, 0}));
  EXPECT_TRUE(k.uncertain);
}

TEST(CountCrossings, EndpointOnOtherCurveUncertain) {
  const auto k = count_crossings(segment({0, 0}, {1, 0}), segment({0.5, 0}, {0.5, 1}));
  EXPECT_TRUE(k.uncertain);
}

TEST(CountCrossings, Symmetric) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = star(rng, {0, 0}, 1.0, 40);
    const auto b = star(rng, {0.4, 0.1}, 0.9, 37);
    const auto ab = count_crossings(a, b), ba = count_crossings(b, a);
    EXPECT_EQ(ab.count, ba.count);
    EXPECT_EQ(ab.uncertain, ba.uncertain);
  }
}

TEST(CountCrossings, ClosedPairsHaveEvenCounts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = star(rng, {0, 0}, 1.0, 30);
    const auto b = star(rng, {0.5, -0.2}, 1.0, 25);
    const auto k = count_crossings(a, b);
    if (!k.uncertain) EXPECT_EQ(k.count % 2, 0);
  }
}

TEST(CountLineCrossings, Examples) {
  const Polyline sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
  EXPECT_EQ(count_line_crossings(sq, LineSpec::vertical(0.5)).count, 2);
  // Line through a vertex of a diamond: crossing, not a touch.
  const Polyline dia({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, true);
  const auto k = count_line_crossings(dia, LineSpec::horizontal(0.0));
  EXPECT_EQ(k.count, 2);
  EXPECT_FALSE(k.uncertain);
  // Tangent at a vertex.
  const auto t = count_line_crossings(dia, LineSpec::horizontal(1.0));
  EXPECT_EQ(t.count, 0);
  EXPECT_TRUE(t.uncertain);
  // Edge lying on the line.
  const auto e = count_line_crossings(sq, LineSpec::horizontal(0.0));
  EXPECT_TRUE(e.uncertain);
}

TEST(CountLineCrossings, ParityForClosedCurves) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ua(0, kPi);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = star(rng, {0, 0}, 1.0, 50);
    const double th = ua(rng);
    const auto k = count_line_crossings(p, LineSpec({u(rng), u(rng)}, {std::cos(th), std::sin(th)}));
    if (!k.uncertain) EXPECT_EQ(k.count % 2, 0);
  }
}

TEST(CountLineCrossings, MatchesGeneralCounter) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.8, 0.8), ua(0, kPi);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = star(rng, {0, 0}, 1.0, 50);
    const double th = ua(rng);
    const LineSpec l({u(rng), u(rng)}, {std::cos(th), std::sin(th)});
    const auto seg = segment(l.base - 10.0 * l.direction, l.base + 10.0 * l.direction);
    const auto a = count_line_crossings(p, l), b = count_crossings(p, seg);
    if (!a.uncertain && !b.uncertain) EXPECT_EQ(a.count, b.count);
  }
}

TEST(CountCrossings, RefinementStable) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = star(rng, {0, 0}, 1.0, 24);
    const auto b = star(rng, {0.3, 0.3}, 1.0, 24);
    const auto k0 = count_crossings(a, b);
    const auto k1 = count_crossings(refine(a), refine(b));
    if (k0.count != k1.count) EXPECT_TRUE(k0.uncertain || k1.uncertain);
  }
}

TEST(Sweep, HorizontalAndVertical) {
  const auto c = sample_circle(1.0, 0.0, 128);
  EXPECT_EQ(max_vertical_crossings(c).max_count, 2);
  EXPECT_EQ(max_horizontal_crossings(c).max_count, 2);
  // Comb: three teeth.
  const Polyline comb({{0, 0}, {0.5, 1}, {1, 0}, {1.5, 1}, {2, 0}, {2.5, 1}, {3, 0}}, false);
  EXPECT_EQ(max_horizontal_crossings(comb).max_count, 6);
  EXPECT_EQ(max_vertical_crossings(comb).max_count, 1);
}

TEST(Monitor, StaticDisjoint) {
  const auto a = sample_circle(1.0, 0.0, 64);
  const auto b = segment({3, -1}, {3, 1});
  const std::vector<double> ts{0.0, 0.1, 0.2};
  const auto r = monotonicity_monitor(ts, [&](double) { return std::make_pair(a, b); });
  for (const auto& s : r.samples) EXPECT_EQ(s.count, 0);
  EXPECT_FALSE(r.violation);
}

TEST(Monitor, ShrinkingCircleAcrossChord) {
  // Radius sqrt(1 - 2t) drops below 0.6 at t = 0.32.
  std::vector<double> ts;
  for (int i = 0; i <= 45; ++i) ts.push_back(i * 0.01);
  const auto chord = segment({-2, 0.6}, {2, 0.6});
  const auto r =
      monotonicity_monitor(ts, [&](double t) { return std::make_pair(sample_circle(1.0, t, 400), chord); });
  EXPECT_FALSE(r.violation);
  for (const auto& s : r.samples) {
    if (std::sqrt(1 - 2 * s.t) > 0.61) EXPECT_EQ(s.count, 2);
    if (std::sqrt(1 - 2 * s.t) < 0.59) EXPECT_EQ(s.count, 0);
  }
}

TEST(Monitor, ViolationNeedsPersistenceAndCertainty) {
  EXPECT_TRUE(monotonicity_monitor({{0, 2, false}, {1, 0, false}, {2, 2, false}, {3, 2, false}}).violation);
  EXPECT_FALSE(monotonicity_monitor({{0, 2, false}, {1, 0, false}, {2, 2, false}, {3, 0, false}}).violation);
  EXPECT_FALSE(monotonicity_monitor({{0, 2, false}, {1, 0, false}, {2, 2, true}, {3, 2, false}}).violation);
  const auto r = monotonicity_monitor({{0, 4, false}, {1, 2, false}, {2, 2, false}});
  EXPECT_FALSE(r.violation);
  EXPECT_EQ(to_json(r).size(), 3u);
  EXPECT_THROW(monotonicity_monitor(std::vector<double>{0.0}, {}), std::exception);
}
