#include "sineflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sineflow/error.hpp"

namespace sineflow {

namespace {

double chord_deviation(Point2 a, Point2 b, Point2 q) { return point_segment_distance(q, a, b); }

}  // namespace

void sample_adaptive(const std::function<Point2(double)>& f, double t0, double t1, double tol, std::size_t budget,
                     std::vector<Point2>& out) {
  const double breaks[2] = {t0, t1};
  sample_adaptive(f, std::span<const double>(breaks, 2), tol, budget, out);
}

void sample_adaptive(const std::function<Point2(double)>& f, std::span<const double> breaks, double tol,
                     std::size_t budget, std::vector<Point2>& out) {
  if (breaks.size() < 2) return;
  const Point2 first = f(breaks.front());
  if (out.empty() || !(out.back() == first)) out.push_back(first);

  struct Span {
    double t0, t1;
    Point2 p0, p1;
    int depth;
  };
  std::vector<Span> stack;
  for (std::size_t k = breaks.size() - 1; k-- > 0;) {
    if (!(breaks[k + 1] > breaks[k])) continue;
    // Pushed in reverse so spans pop in parameter order.
    stack.push_back({breaks[k], breaks[k + 1], f(breaks[k]), f(breaks[k + 1]), 0});
  }
  // Each span is refined depth-first; left halves are processed first.
  while (!stack.empty()) {
    const Span s = stack.back();
    stack.pop_back();
    const double tm = 0.5 * (s.t0 + s.t1);
    const Point2 pm = f(tm);
    const Point2 pq1 = f(0.5 * (s.t0 + tm));
    const Point2 pq3 = f(0.5 * (tm + s.t1));
    const double dev = std::max({chord_deviation(s.p0, s.p1, pm), chord_deviation(s.p0, s.p1, pq1),
                                 chord_deviation(s.p0, s.p1, pq3)});
    if (dev > tol && s.depth < 60 && tm > s.t0 && tm < s.t1) {
      stack.push_back({tm, s.t1, pm, s.p1, s.depth + 1});
      stack.push_back({s.t0, tm, s.p0, pm, s.depth + 1});
      continue;
    }
    if (!(out.back() == s.p1)) out.push_back(s.p1);
    if (out.size() > budget)
      fail(ErrorKind::ResolutionError, "vertex budget " + std::to_string(budget) + " exceeded by adaptive sampling");
  }
}

Point2 point_at_arclength(std::span<const Point2> chain, double s) {
  if (chain.empty()) fail(ErrorKind::InvalidInput, "empty chain");
  if (s <= 0.0) return chain.front();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const double len = distance(chain[i], chain[i + 1]);
    if (acc + len >= s) return chain[i] + ((s - acc) / len) * (chain[i + 1] - chain[i]);
    acc += len;
  }
  return chain.back();
}

std::vector<Point2> trim_front(std::span<const Point2> chain, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const double len = distance(chain[i], chain[i + 1]);
    if (acc + len > s) {
      std::vector<Point2> out;
      out.push_back(chain[i] + ((s - acc) / len) * (chain[i + 1] - chain[i]));
      for (std::size_t j = i + 1; j < chain.size(); ++j)
        if (!(out.back() == chain[j])) out.push_back(chain[j]);
      return out;
    }
    acc += len;
  }
  fail(ErrorKind::ConstructionError, "trim longer than chain");
}

std::vector<Point2> trim_back(std::span<const Point2> chain, double s) {
  std::vector<Point2> rev(chain.rbegin(), chain.rend());
  auto out = trim_front(rev, s);
  std::reverse(out.begin(), out.end());
  return out;
}

void append_quadratic(Point2 a, Point2 c, Point2 b, double tol, std::vector<Point2>& out) {
  auto f = [&](double t) { return (1 - t) * (1 - t) * a + 2 * (1 - t) * t * c + t * t * b; };
  std::vector<Point2> tmp{a};
  sample_adaptive(f, 0.0, 1.0, tol, 1u << 20, tmp);
  for (std::size_t i = 1; i + 1 < tmp.size(); ++i) out.push_back(tmp[i]);
}

}  // namespace sineflow
