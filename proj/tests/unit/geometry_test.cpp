#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sineflow/error.hpp"
#include "sineflow/geometry.hpp"

using namespace sineflow;

namespace {

constexpr double kPi = std::numbers::pi;

Polyline unit_square() { return Polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true); }

Polyline regular_polygon(int n, double r = 1.0, Point2 c = {0, 0}, double phase = 0.0) {
  std::vector<Point2> v;
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2.0 * kPi * k / n;
    v.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return Polyline(v, true);
}

Polyline random_open_polyline(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> v;
  for (int k = 0; k < n; ++k) v.push_back({u(rng), u(rng)});
  return make_polyline_dedup(v, false);
}

void expect_error(ErrorKind kind, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(PolylineLength, Examples) {
  EXPECT_DOUBLE_EQ(polyline_length(unit_square()), 4.0);
  EXPECT_DOUBLE_EQ(polyline_length(Polyline({{0, 0}, {3, 4}}, false)), 5.0);
  const double oracle = 2.0 * 256.0 * std::sin(kPi / 256.0);
  const double got = polyline_length(regular_polygon(256));
  EXPECT_NEAR(got, oracle, 1e-12);
  EXPECT_NEAR(got, 2.0 * kPi, 1e-3);
}

TEST(PolylineLength, RejectsDegenerateInput) {
  expect_error(ErrorKind::InvalidInput, [] { Polyline({{0, 0}}, false); });
  expect_error(ErrorKind::InvalidInput, [] { Polyline({{0, 0}, {0, 0}}, false); });
  expect_error(ErrorKind::InvalidInput, [] { Polyline({{0, 0}, {NAN, 1}}, false); });
}

TEST(EnclosedArea, Examples) {
  EXPECT_DOUBLE_EQ(enclosed_area(unit_square()), 1.0);
  EXPECT_NEAR(enclosed_area(regular_polygon(256)), 128.0 * std::sin(2.0 * kPi / 256.0), 1e-12);
  EXPECT_NEAR(enclosed_area(regular_polygon(256)), kPi, 1e-3);
  EXPECT_DOUBLE_EQ(enclosed_area(Polyline({{0, 0}, {1, 0}, {0, 1}}, true)), 0.5);
  EXPECT_GT(signed_area(unit_square()), 0.0);
}

TEST(EnclosedArea, Errors) {
  expect_error(ErrorKind::InvalidInput, [] { enclosed_area(Polyline({{0, 0}, {1, 0}, {1, 1}}, false)); });
  expect_error(ErrorKind::EmbeddednessViolation,
               [] { enclosed_area(Polyline({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true)); });
}

TEST(EnclosedArea, InvariantUnderRotationOfListAndRigidMotion) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    // Star-shaped random polygon is always embedded.
    std::vector<Point2> v;
    const int n = 5 + trial % 20;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * kPi * (k + 0.8 * u(rng)) / n;
      const double r = 0.5 + u(rng);
      v.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const Polyline p(v, true);
    const double a0 = enclosed_area(p);
    std::rotate(v.begin(), v.begin() + trial % n, v.end());
    EXPECT_NEAR(enclosed_area(Polyline(v, true)), a0, 1e-12 * a0);
    const double th = 2.0 * kPi * u(rng);
    const Point2 shift{10.0 * u(rng), -5.0 * u(rng)};
    const Polyline moved = transform(p, [&](Point2 q) {
      return Point2{std::cos(th) * q.x - std::sin(th) * q.y, std::sin(th) * q.x + std::cos(th) * q.y} + shift;
    });
    EXPECT_NEAR(enclosed_area(moved), a0, 1e-12 * a0 * 20);
  }
}

TEST(Hausdorff, Examples) {
  const auto c = regular_polygon(64);
  EXPECT_LE(hausdorff_distance(c, c), 1e-12);
  const double d = 0.37;
  EXPECT_NEAR(hausdorff_distance(Polyline({{0, 0}, {1, 0}}, false), Polyline({{0, d}, {1, d}}, false)), d, 1e-12);
  const double sagitta = 1.0 - std::cos(kPi / 256.0);
  const double got = hausdorff_distance(regular_polygon(256), regular_polygon(512));
  EXPECT_LT(got, 1e-3);
  EXPECT_NEAR(got, sagitta, 1e-9);
}

TEST(Hausdorff, UsesEdgeInteriorsNotOnlyVertices) {
  const Polyline a({{0, 0}, {2, 0}}, false);
  const Polyline b({{0, 0}, {0, 1}, {2, 1}, {2, 0}}, false);
  EXPECT_NEAR(directed_hausdorff(a, b), 1.0, 1e-9);
  EXPECT_NEAR(directed_hausdorff(b, a), 1.0, 1e-9);
}

TEST(Hausdorff, SymmetryAndTriangleInequality) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_open_polyline(rng, 3 + trial % 6);
    const auto b = random_open_polyline(rng, 3 + trial % 5);
    const auto c = random_open_polyline(rng, 2 + trial % 7);
    const double ab = hausdorff_distance(a, b), ba = hausdorff_distance(b, a);
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(ab, hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-9);
  }
}

TEST(RestrictToBall, Examples) {
  const Ball unit({0, 0}, 1.0);
  const auto diam = restrict_to_ball(Polyline({{-3, 0}, {3, 0}}, false), unit);
  ASSERT_EQ(diam.size(), 1u);
  EXPECT_NEAR(polyline_length(diam[0]), 2.0, 1e-12);

  EXPECT_TRUE(restrict_to_ball(Polyline({{5, 5}, {6, 5}, {6, 6}}, false), unit).empty());

  const auto circle = regular_polygon(8192);
  const auto arc = restrict_to_ball(circle, Ball({1, 0}, 0.5));
  ASSERT_EQ(arc.size(), 1u);
  EXPECT_NEAR(polyline_length(arc[0]), 2.0 * std::acos(7.0 / 8.0), 1e-3);
}

TEST(RestrictToBall, TangentEdgeContributesNothing) {
  const auto pieces = restrict_to_ball(Polyline({{-1, 1}, {1, 1}}, false), Ball({0, 0}, 1.0));
  EXPECT_TRUE(pieces.empty());
}

TEST(RestrictToBall, PiecesDisjointAndNoLongerThanInput) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_open_polyline(rng, 4 + trial % 30);
    const Ball b({0.5 * u(rng), 0.5 * u(rng)}, 0.2 + 0.6 * std::abs(u(rng)));
    const auto pieces = restrict_to_ball(p, b);
    double total = 0.0;
    for (const auto& q : pieces) {
      total += polyline_length(q);
      for (const auto& v : q.vertices()) EXPECT_LE(distance(v, b.center), b.radius + 1e-12);
    }
    EXPECT_LE(total, polyline_length(p) + 1e-12);
    // Distinct pieces come from distinct parameter ranges; their endpoints
    // cannot coincide unless the input revisits a point.
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
      EXPECT_FALSE(pieces[i].vertices().back() == pieces[i + 1].vertices().front());
  }
}

TEST(Resample, Examples) {
  const auto seg = resample_by_arclength(Polyline({{0, 0}, {1, 0}}, false), 0.25);
  ASSERT_EQ(seg.size(), 5u);
  for (std::size_t i = 0; i < seg.size(); ++i) EXPECT_NEAR(seg[i].x, 0.25 * static_cast<double>(i), 1e-15);

  const auto sq = resample_by_arclength(unit_square(), 0.5);
  ASSERT_EQ(sq.size(), 8u);
  EXPECT_TRUE(sq.closed());
  for (std::size_t e = 0; e < sq.edge_count(); ++e) EXPECT_NEAR(distance(sq.edge_start(e), sq.edge_end(e)), 0.5, 1e-15);
}

TEST(Resample, RejectsSpacingNotBelowLength) {
  expect_error(ErrorKind::InvalidInput, [] { resample_by_arclength(Polyline({{0, 0}, {1, 0}}, false), 1.0); });
  expect_error(ErrorKind::InvalidInput, [] { resample_by_arclength(Polyline({{0, 0}, {1, 0}}, false), 0.0); });
}

TEST(Resample, TracesSameSetAndKeepsLength) {
  // Corpus: smooth curves with curvature at most 3, finely sampled, plus
  // polygons whose corners are kept as breakpoints.
  std::vector<Polyline> corpus;
  for (double r : {0.4, 1.0, 2.5}) corpus.push_back(regular_polygon(2000, r, {0.3, -0.2}, 0.1));
  {
    std::vector<Point2> v;
    for (int k = 0; k < 3000; ++k) {
      const double a = 2.0 * kPi * k / 3000.0;
      v.push_back({1.5 * std::cos(a), 0.8 * std::sin(a)});
    }
    corpus.emplace_back(v, true);
  }
  {
    std::vector<Point2> v;
    for (int k = 0; k <= 2000; ++k) {
      const double x = 4.0 * k / 2000.0;
      v.push_back({x, 0.3 * std::sin(2.0 * x)});
    }
    corpus.emplace_back(v, false);
  }
  corpus.push_back(unit_square());
  corpus.push_back(Polyline({{0, 0}, {2, 0}, {2, 1}, {1, 3}}, false));
  for (const auto& p : corpus) {
    for (double h : {0.2, 0.1, 0.05}) {
      const auto r = resample_by_arclength(p, h);
      EXPECT_EQ(r.closed(), p.closed());
      EXPECT_LE(hausdorff_distance(p, r), h * h + 1e-12) << "h=" << h;
      EXPECT_LE(std::abs(polyline_length(r) - polyline_length(p)), 4.0 * h);
      for (std::size_t e = 0; e < r.edge_count(); ++e) {
        const double len = distance(r.edge_start(e), r.edge_end(e));
        EXPECT_GE(len, 0.5 * h - 1e-12);
        EXPECT_LE(len, 2.0 * h + 1e-12);
      }
    }
  }
}

TEST(PointInRegion, Examples) {
  EXPECT_EQ(point_in_region(unit_square(), {0.5, 0.5}), Containment::Inside);
  EXPECT_EQ(point_in_region(unit_square(), {2, 0}), Containment::Outside);
  EXPECT_EQ(point_in_region(unit_square(), {1, 0.5}), Containment::OnBoundary);
  EXPECT_EQ(point_in_region(unit_square(), {0.5, 1e-10}), Containment::OnBoundary);
}

TEST(SelfIntersection, DetectsCrossingsAndFolds) {
  EXPECT_TRUE(is_embedded(unit_square()));
  EXPECT_FALSE(is_embedded(Polyline({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true)));
  EXPECT_FALSE(is_embedded(Polyline({{0, 0}, {2, 0}, {1, 0}}, false)));
  EXPECT_TRUE(is_embedded(Polyline({{0, 0}, {1, 0}, {2, 0}}, false)));
}
