#include "sineflow/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "sineflow/io.hpp"
#include "sineflow/segment_index.hpp"

namespace sineflow {

void FlowParams::validate() const {
  if (!(cfl > 0.0 && cfl <= 0.5)) fail(ErrorKind::InvalidInput, "cfl must lie in (0, 0.5]");
  if (!(remesh_lo > 0.0 && remesh_lo < 1.0 && remesh_hi > 1.0))
    fail(ErrorKind::InvalidInput, "remesh triggers must satisfy remesh_lo < 1 < remesh_hi");
  if (!(angle > 0.0) || !(h_floor_ratio > 0.0 && h_floor_ratio <= 1.0) || !(grading > 0.0))
    fail(ErrorKind::InvalidInput, "bad spacing field parameters");
  if (max_halvings < 0) fail(ErrorKind::InvalidInput, "max_halvings must be nonnegative");
}

// (O - q) / |O - q|^2 with O the circumcenter, written with a single division.
Vec2 menger_vector(Point2 p, Point2 q, Point2 r) {
  const Vec2 a = p - q, b = r - q, c = a - b;
  const double aa = dot(a, a), bb = dot(b, b);
  const double den = aa * bb * dot(c, c);
  if (!(den > 0.0) || !std::isfinite(den)) return {0.0, 0.0};
  const double s = 2.0 * cross(a, b) / den;
  return {s * (b.y * aa - a.y * bb), s * (a.x * bb - b.x * aa)};
}

Vec2 curvature_vector(const FlowState& state, std::size_t i) {
  const auto& p = state.curve;
  const std::size_t n = p.size();
  if (i >= n) fail(ErrorKind::InvalidInput, "vertex index out of range");
  if (!p.closed() && (i == 0 || i + 1 == n)) fail(ErrorKind::InvalidInput, "curvature needs an interior vertex");
  return menger_vector(p[(i + n - 1) % n], p[i], p[(i + 1) % n]);
}

namespace {

constexpr double kFoldAngle = 1e-9;

// theta / sin(theta) for the turning angle theta at q.
double turning_factor(Point2 p, Point2 q, Point2 r) {
  const Vec2 a = q - p, b = r - q;
  const double s = std::abs(cross(a, b)), c = dot(a, b);
  if (s <= 1e-3 * std::abs(c)) return 1.0;
  return std::atan2(s, c) * std::sqrt(dot(a, a) * dot(b, b)) / s;
}
// Vertices whose interior angle is below asin(kSpikeSin) are spikes below mesh resolution.
constexpr double kSpikeSin = 0.35;

bool is_spike(Point2 prev, Point2 q, Point2 next) {
  const Vec2 u = prev - q, w = next - q;
  const double c = cross(u, w);
  return dot(u, w) > 0.0 && c * c < kSpikeSin * kSpikeSin * dot(u, u) * dot(w, w);
}

// Turn at b is below 60 degrees.
bool mild_turn(Point2 a, Point2 b, Point2 c) {
  const Vec2 u = b - a, w = c - b;
  const double d = dot(u, w);
  return d > 0.0 && 4.0 * d * d >= dot(u, u) * dot(w, w);
}

std::size_t cyc_dist(std::size_t e, std::size_t f, std::size_t m, bool closed) {
  const std::size_t d = e > f ? e - f : f - e;
  return closed ? std::min(d, m - d) : d;
}

// Vertex spacing field: angle / |kappa| clamped to [floor, h], then graded.
// len[e] is the length of the edge from vertex e to e + 1.
void grade_spacing(const std::vector<double>& kappa, const std::vector<double>& len, bool closed, double mesh_h,
                   const FlowParams& prm, std::vector<double>& tau) {
  const std::size_t n = kappa.size();
  const double lo = prm.h_floor_ratio * mesh_h;
  tau.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    tau[i] = kappa[i] * mesh_h > prm.angle ? std::max(prm.angle / kappa[i], lo) : mesh_h;
  const double g = prm.grading;
  if (n == 0) return;
  const int rounds = closed ? 2 : 1;
  for (int r = 0; r < rounds; ++r) {
    if (closed) tau[0] = std::min(tau[0], tau[n - 1] + g * len[n - 1]);
    for (std::size_t i = 1; i < n; ++i) tau[i] = std::min(tau[i], tau[i - 1] + g * len[i - 1]);
    if (closed) tau[n - 1] = std::min(tau[n - 1], tau[0] + g * len[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) tau[k] = std::min(tau[k], tau[k + 1] + g * len[k]);
  }
}

std::vector<double> edge_lengths(const std::vector<Point2>& pts, bool closed) {
  const std::size_t n = pts.size();
  std::vector<double> len(n, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) len[e] = distance(pts[e], pts[e + 1]);
  if (closed && n > 1) len[n - 1] = distance(pts[n - 1], pts[0]);
  return len;
}

std::vector<double> spacing_field(const std::vector<Point2>& pts, bool closed, const std::vector<double>& kappa,
                                  double mesh_h, const FlowParams& prm) {
  std::vector<double> tau;
  grade_spacing(kappa, edge_lengths(pts, closed), closed, mesh_h, prm, tau);
  return tau;
}

std::vector<double> curvature_magnitudes(const std::vector<Point2>& pts, bool closed) {
  const std::size_t n = pts.size();
  std::vector<double> k(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!closed && (i == 0 || i + 1 == n)) continue;
    k[i] = norm(menger_vector(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]));
  }
  if (!closed && n > 2) {
    k[0] = k[1];
    k[n - 1] = k[n - 2];
  }
  return k;
}

// Minimum distance between edges at cyclic index distance >= 3, capped at `cap`.
// Consecutive edges are spatially coherent, so a hierarchy over index ranges
// needs no sorting; a dual traversal prunes node pairs farther apart than the
// current best.
class Clearance {
 public:
  double operator()(const std::vector<Point2>& pts, bool closed, double cap) {
    p_ = pts.data();
    n_ = pts.size();
    m_ = closed ? n_ : n_ - 1;
    closed_ = closed;
    best_ = cap;
    nodes_.clear();
    nodes_.reserve(2 * (m_ / kLeaf + 1) + 1);
    if (m_ < 4) return cap;
    build(0, m_);
    visit(0, 0);
    return best_;
  }

 private:
  static constexpr std::size_t kLeaf = 8;
  struct Node {
    Box box;
    std::size_t lo, hi, left, right;
  };

  std::size_t build(std::size_t lo, std::size_t hi) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({{}, lo, hi, 0, 0});
    Box box;
    if (hi - lo <= kLeaf) {
      box = {p_[lo], p_[lo]};
      for (std::size_t e = lo; e < hi; ++e) {
        const Point2 q = p_[e + 1 < n_ ? e + 1 : 0];
        box.lo = {std::min(box.lo.x, q.x), std::min(box.lo.y, q.y)};
        box.hi = {std::max(box.hi.x, q.x), std::max(box.hi.y, q.y)};
      }
    } else {
      const std::size_t mid = lo + (hi - lo) / 2;
      const std::size_t l = build(lo, mid), r = build(mid, hi);
      nodes_[id].left = l;
      nodes_[id].right = r;
      const Box &bl = nodes_[l].box, &br = nodes_[r].box;
      box = {{std::min(bl.lo.x, br.lo.x), std::min(bl.lo.y, br.lo.y)},
             {std::max(bl.hi.x, br.hi.x), std::max(bl.hi.y, br.hi.y)}};
    }
    nodes_[id].box = box;
    return id;
  }

  bool leaf(const Node& nd) const { return nd.hi - nd.lo <= kLeaf; }

  double box_gap2(const Box& a, const Box& b) const {
    const double dx = std::max({0.0, a.lo.x - b.hi.x, b.lo.x - a.hi.x});
    const double dy = std::max({0.0, a.lo.y - b.hi.y, b.lo.y - a.hi.y});
    return dx * dx + dy * dy;
  }

  void test(std::size_t e, std::size_t f) {
    if (cyc_dist(e, f, m_, closed_) < 3) return;
    const Point2 a = p_[e], b = p_[e + 1 < n_ ? e + 1 : 0], c = p_[f], d0 = p_[f + 1 < n_ ? f + 1 : 0];
    const double gx = std::max({0.0, std::min(c.x, d0.x) - std::max(a.x, b.x), std::min(a.x, b.x) - std::max(c.x, d0.x)});
    const double gy = std::max({0.0, std::min(c.y, d0.y) - std::max(a.y, b.y), std::min(a.y, b.y) - std::max(c.y, d0.y)});
    if (gx * gx + gy * gy >= best_ * best_) return;
    const double d = segment_segment_distance(a, b, c, d0);
    best_ = std::min(best_, d);
  }

  void visit(std::size_t a, std::size_t b) {
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (box_gap2(na.box, nb.box) >= best_ * best_) return;
    if (a == b) {
      if (leaf(na)) {
        for (std::size_t e = na.lo; e < na.hi; ++e)
          for (std::size_t f = e + 3; f < na.hi; ++f) test(e, f);
        return;
      }
      const std::size_t l = na.left, r = na.right;
      visit(l, l);
      visit(r, r);
      visit(l, r);
      return;
    }
    if (leaf(na) && leaf(nb)) {
      for (std::size_t e = na.lo; e < na.hi; ++e)
        for (std::size_t f = nb.lo; f < nb.hi; ++f) test(e, f);
      return;
    }
    if (leaf(nb) || (!leaf(na) && na.hi - na.lo >= nb.hi - nb.lo)) {
      visit(na.left, b);
      visit(na.right, b);
    } else {
      visit(a, nb.left);
      visit(a, nb.right);
    }
  }

  const Point2* p_ = nullptr;
  std::size_t n_ = 0, m_ = 0;
  bool closed_ = false;
  double best_ = 0.0;
  std::vector<Node> nodes_;
};


// Near pairs: adjacent edges must not fold, edges two apart must not meet. A
// chain of three edges whose two turns are both below 90 degrees has total
// turning below pi and cannot self-intersect, so only sharp turns are tested.
bool local_ok(const std::vector<Point2>& pts, bool closed, std::vector<char>& sharp) {
  const std::size_t n = pts.size();
  const std::size_t m = closed ? n : n - 1;
  sharp.assign(n, 0);
  const Point2* p = pts.data();
  auto turn = [&](std::size_t i, std::size_t prev, std::size_t next) {
    const Vec2 u = p[prev] - p[i], w = p[next] - p[i];
    if (dot(u, w) < 0.0) return true;
    sharp[i] = 1;
    const double nu = norm(u), nw = norm(w);
    if (!(nu > 0.0) || !(nw > 0.0)) return false;
    return std::abs(cross(u, w)) > kFoldAngle * nu * nw;
  };
  bool any = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 u = p[i - 1] - p[i], w = p[i + 1] - p[i];
    if (dot(u, w) < 0.0) continue;
    any = true;
    if (!turn(i, i - 1, i + 1)) return false;
  }
  if (closed && n > 2) {
    if (!turn(0, n - 1, 1) || !turn(n - 1, n - 2, 0)) return false;
    any = any || sharp[0] || sharp[n - 1];
  }
  if (m < 3 || !any) return true;
  for (std::size_t e = 0; e < m; ++e) {
    if (!closed && e + 2 >= m) break;
    const std::size_t j = e + 1 < n ? e + 1 : e + 1 - n, k = e + 2 < n ? e + 2 : e + 2 - n;
    if (!sharp[j] && !sharp[k]) continue;
    const std::size_t f = e + 2 < m ? e + 2 : e + 2 - m;
    const std::size_t g = f + 1 < n ? f + 1 : 0;
    if (segment_segment_distance(p[e], p[j], p[f], p[g]) <= kTauGeo) return false;
  }
  return true;
}

bool local_ok(const std::vector<Point2>& pts, bool closed) {
  std::vector<char> sharp;
  return local_ok(pts, closed, sharp);
}

Polyline place_by_density(const std::vector<Point2>& pts, bool closed, const std::vector<double>& tau) {
  const std::size_t n = pts.size();
  const std::size_t m = closed ? n : n - 1;
  std::vector<double> phi(m + 1, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t j = (e + 1) % n;
    phi[e + 1] = phi[e] + distance(pts[e], pts[j]) * 0.5 * (1.0 / tau[e] + 1.0 / tau[j]);
  }
  const double total = phi[m];
  const auto cnt = static_cast<std::size_t>(std::max<double>(closed ? 3.0 : 1.0, std::round(total)));
  std::vector<Point2> out;
  out.reserve(cnt + 1);
  std::size_t e = 0;
  const std::size_t last = closed ? cnt - 1 : cnt;
  for (std::size_t k = 0; k <= last; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(cnt);
    while (e + 1 < m && phi[e + 1] < target) ++e;
    const double span = phi[e + 1] - phi[e];
    const double f = span > 0.0 ? std::clamp((target - phi[e]) / span, 0.0, 1.0) : 0.0;
    out.push_back(pts[e] + f * (pts[(e + 1) % n] - pts[e]));
  }
  if (!closed) {
    out.front() = pts.front();
    out.back() = pts.back();
  }
  return make_polyline_dedup(std::move(out), closed, 0.0);
}

class Evolver {
 public:
  Evolver(const FlowState& s, const FlowParams& prm)
      : pts_(s.curve.vertices()), closed_(s.curve.closed()), time_(s.time), h_(s.mesh_h), prm_(prm) {
    prm_.validate();
    if (!(h_ > 0.0)) fail(ErrorKind::InvalidInput, "mesh_h must be positive");
    if (!local_ok(pts_, closed_)) fail(ErrorKind::EmbeddednessViolation, "initial curve folds");
    refresh_clearance();
    if (clear_ <= kTauGeo) fail(ErrorKind::EmbeddednessViolation, "initial curve is not embedded");
  }

  FlowState state() const { return {Polyline(pts_, closed_), time_, h_}; }
  double time() const { return time_; }

  // One accepted step, no longer than dt_max.
  void step(double dt_max) {
    measure();
    check_extinction();
    if (remesh()) measure();
    const std::size_t n = pts_.size();
    const std::size_t m = closed_ ? n : n - 1;
    double min_edge = INFINITY, max_k = 0.0;
    for (std::size_t e = 0; e < m; ++e) min_edge = std::min(min_edge, len_[e]);
    for (double k : kmag_) max_k = std::max(max_k, k);
    double dt = std::min(prm_.cfl * min_edge * min_edge, dt_max);
    for (int attempt = 0; attempt <= prm_.max_halvings; ++attempt, dt *= 0.5) {
      trial_.resize(n);
      for (std::size_t i = 0; i < n; ++i) trial_[i] = pts_[i] + dt * kappa_vec_[i];
      if (!local_ok(trial_, closed_, sharp_)) continue;
      const double disp = dt * max_k;
      if (2.0 * (drift_ + disp) >= clear_) {
        const double c = clear_fn_(trial_, closed_, cap());
        if (c <= kTauGeo) continue;
        clear_ = c;
        drift_ = 0.0;
      } else {
        drift_ += disp;
      }
      pts_.swap(trial_);
      time_ += dt;
      ++steps_;
      return;
    }
    fail(ErrorKind::StepRejected, "embeddedness lost after " + std::to_string(prm_.max_halvings) + " halvings");
  }

  void advance_to(double t_target) {
    while (time_ < t_target) {
      const double rem = t_target - time_;
      step(rem);
      if (t_target - time_ < 1e-15 * std::max(1.0, t_target)) time_ = t_target;
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  double cap() const { return 4.0 * h_; }

  void refresh_clearance() {
    clear_ = clear_fn_(pts_, closed_, cap());
    drift_ = 0.0;
  }

  // Edge lengths and curvature vectors of the current vertices.
  void measure() {
    const std::size_t n = pts_.size();
    len_.resize(n);
    for (std::size_t e = 0; e + 1 < n; ++e) len_[e] = distance(pts_[e], pts_[e + 1]);
    len_[n - 1] = closed_ ? distance(pts_[n - 1], pts_[0]) : 0.0;
    kappa_vec_.assign(n, {0.0, 0.0});
    kmag_.assign(n, 0.0);
    const Point2* p = pts_.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      kappa_vec_[i] = menger_vector(p[i - 1], p[i], p[i + 1]);
      kmag_[i] = norm(kappa_vec_[i]);
    }
    if (closed_) {
      kappa_vec_[0] = menger_vector(p[n - 1], p[0], p[1]);
      kappa_vec_[n - 1] = menger_vector(p[n - 2], p[n - 1], p[0]);
      kmag_[0] = norm(kappa_vec_[0]);
      kmag_[n - 1] = norm(kappa_vec_[n - 1]);
    }
    if (prm_.turning_correction) {
      for (std::size_t i = closed_ ? 0 : 1; i < (closed_ ? n : n - 1); ++i) {
        const double f = turning_factor(p[(i + n - 1) % n], p[i], p[(i + 1) % n]);
        kappa_vec_[i] *= f;
        kmag_[i] *= f;
      }
    }
    if (!closed_ && n > 2) {
      kmag_[0] = kmag_[1];
      kmag_[n - 1] = kmag_[n - 2];
      if (prm_.boundary == Boundary::Free) {
        kappa_vec_[0] = kappa_vec_[1];
        kappa_vec_[n - 1] = kappa_vec_[n - 2];
      }
    }
  }

  void check_extinction() {
    if (!closed_) return;
    double len = 0.0;
    for (double l : len_) len += l;
    if (len < prm_.extinction_factor * h_)
      throw ExtinctionError(state(), "curve length below extinction threshold at t = " + std::to_string(time_));
  }

  // Local split/collapse against the curvature-adaptive spacing field.
  // Returns true when the vertices changed.
  bool remesh() {
    const std::size_t n = pts_.size();
    const std::size_t m = closed_ ? n : n - 1;
    grade_spacing(kmag_, len_, closed_, h_, prm_, tau_);
    const auto& tau = tau_;
    auto target = [&](std::size_t e) { return std::min(tau[e], tau[(e + 1) % n]); };
    bool any = false;
    for (std::size_t e = 0; e < m && !any; ++e) {
      const double t = std::min(tau[e], tau[e + 1 < n ? e + 1 : 0]);
      any = len_[e] > prm_.remesh_hi * t || len_[e] < prm_.remesh_lo * t;
    }
    const std::size_t i0 = closed_ ? 0 : 1, i1 = closed_ ? n : n - 1;
    for (std::size_t i = i0; i < i1 && !any; ++i)
      any = is_spike(pts_[i == 0 ? n - 1 : i - 1], pts_[i], pts_[i + 1 < n ? i + 1 : 0]);
    if (!any) return false;

    std::vector<Point2> out;
    out.reserve(n + n / 4);
    std::vector<char> drop(n, 0), touched(n, 0);
    std::vector<std::pair<std::size_t, Point2>> moved;
    double shift = 0.0;
    // Collapses: merge short edges into their midpoint, skipping neighbors of merged edges.
    std::size_t merged = 0;
    // Spikes: replace the tip by the chord of its neighbors.
    for (std::size_t i = i0; i < i1; ++i) {
      if (n - merged <= (closed_ ? 4u : 2u)) break;
      const std::size_t a = i == 0 ? n - 1 : i - 1, b = i + 1 < n ? i + 1 : 0;
      if (touched[a] || touched[i] || touched[b]) continue;
      if (!is_spike(pts_[a], pts_[i], pts_[b])) continue;
      touched[a] = touched[i] = touched[b] = 1;
      drop[i] = 1;
      shift = std::max(shift, point_segment_distance(pts_[i], pts_[a], pts_[b]));
      ++merged;
    }
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t a = e, b = (e + 1) % n;
      if (touched[a] || touched[b]) continue;
      if (n - merged <= (closed_ ? 4u : 2u)) break;
      const double len = distance(pts_[a], pts_[b]);
      if (!(len < prm_.remesh_lo * target(e))) continue;
      const std::size_t pa = (a + n - 1) % n, nb = (b + 1) % n;
      const bool a_fixed = !closed_ && a == 0, b_fixed = !closed_ && b + 1 == n;
      if (a_fixed && b_fixed) continue;
      // Skip if it would create an overlong neighbor edge.
      const Point2 mid = a_fixed ? pts_[a] : (b_fixed ? pts_[b] : 0.5 * (pts_[a] + pts_[b]));
      const double t_here = prm_.remesh_hi * target(e);
      if ((closed_ || a > 0) && distance(pts_[pa], mid) > t_here) continue;
      if ((closed_ || b + 1 < n) && distance(mid, pts_[nb]) > t_here) continue;
      if (touched[pa] || touched[nb]) continue;
      touched[a] = touched[b] = 1;
      if (a_fixed) {
        drop[b] = 1;
      } else if (b_fixed) {
        drop[a] = 1;
      } else {
        drop[b] = 1;
        moved.push_back({a, mid});
      }
      shift = std::max(shift, 0.5 * len);
      ++merged;
    }
    std::vector<Point2> cur = pts_;
    for (const auto& [i, p] : moved) cur[i] = p;
    std::vector<Point2> kept;
    kept.reserve(n);
    std::vector<double> kept_tau;
    kept_tau.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!drop[i]) {
        kept.push_back(cur[i]);
        kept_tau.push_back(tau[i]);
      }
    // Splits: four-point insertion on long edges.
    const std::size_t k = kept.size();
    const std::size_t km = closed_ ? k : k - 1;
    for (std::size_t e = 0; e < km; ++e) {
      const std::size_t b = (e + 1) % k;
      out.push_back(kept[e]);
      const double len = distance(kept[e], kept[b]);
      const double t = std::min(kept_tau[e], kept_tau[b]);
      if (len > prm_.remesh_hi * t) {
        const Point2 mid = 0.5 * (kept[e] + kept[b]);
        Point2 q = mid;
        const bool have_prev = closed_ || e > 0, have_next = closed_ || e + 2 < k;
        if (have_prev && have_next) {
          const Point2 p0 = kept[(e + k - 1) % k], p3 = kept[(e + 2) % k];
          if (mild_turn(p0, kept[e], kept[b]) && mild_turn(kept[e], kept[b], p3))
            q = (1.0 / 16.0) * (9.0 * (kept[e] + kept[b]) - (p0 + p3));
        }
        shift = std::max(shift, distance(q, mid));
        out.push_back(q);
      }
    }
    if (!closed_) out.push_back(kept.back());
    if (!local_ok(out, closed_, sharp_)) return false;
    if (2.0 * (drift_ + shift) >= clear_) {
      const double c = clear_fn_(out, closed_, cap());
      if (c <= kTauGeo) return false;
      clear_ = c;
      drift_ = 0.0;
    } else {
      drift_ += shift;
    }
    pts_.swap(out);
    return true;
  }

  std::vector<Point2> pts_;
  bool closed_;
  double time_;
  double h_;
  FlowParams prm_;
  double clear_ = 0.0;
  double drift_ = 0.0;
  std::size_t steps_ = 0;
  std::vector<Vec2> kappa_vec_;
  std::vector<double> kmag_, len_, tau_;
  std::vector<Point2> trial_;
  std::vector<char> sharp_;
  Clearance clear_fn_;
};

}  // namespace

Polyline adaptive_remesh(const Polyline& p, double mesh_h, const FlowParams& params) {
  params.validate();
  if (!(mesh_h > 0.0)) fail(ErrorKind::InvalidInput, "mesh_h must be positive");
  const auto& pts = p.vertices();
  const auto tau = spacing_field(pts, p.closed(), curvature_magnitudes(pts, p.closed()), mesh_h, params);
  return place_by_density(pts, p.closed(), tau);
}

FlowState make_flow_state(const Polyline& p, double mesh_h, const FlowParams& params) {
  return {adaptive_remesh(p, mesh_h, params), 0.0, mesh_h};
}

FlowState csf_step(const FlowState& state, const FlowParams& params, double dt_max) {
  Evolver ev(state, params);
  ev.step(dt_max);
  return ev.state();
}

FlowState evolve_to(const FlowState& state, double t_target, const FlowParams& params) {
  if (!(t_target >= state.time)) fail(ErrorKind::InvalidInput, "t_target before current time");
  Evolver ev(state, params);
  ev.advance_to(t_target);
  return ev.state();
}

std::vector<FlowState> evolve_snapshots(const FlowState& state, std::span<const double> times,
                                        const FlowParams& params) {
  Evolver ev(state, params);
  std::vector<FlowState> out;
  for (double t : times) {
    if (!(t >= ev.time())) fail(ErrorKind::InvalidInput, "snapshot times must be nondecreasing");
    ev.advance_to(t);
    out.push_back(ev.state());
  }
  return out;
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SINEFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

std::vector<FlowOutcome> evolve_family(std::span<const FlowState> states, double t_target, const FlowParams& params) {
  if (!states.empty())
    for (const auto& s : states)
      if (s.time != states.front().time) fail(ErrorKind::InvalidInput, "family members must share a time");
  std::vector<std::optional<FlowOutcome>> slots(states.size());
  std::vector<std::exception_ptr> errors(states.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < states.size(); i = next++) {
      try {
        slots[i] = FlowOutcome{evolve_to(states[i], t_target, params), std::nullopt};
      } catch (const ExtinctionError& e) {
        slots[i] = FlowOutcome{e.last(), e.time()};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned nt = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max<std::size_t>(1, states.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < nt; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<FlowOutcome> out;
  out.reserve(states.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

nlohmann::json write_snapshots(const std::filesystem::path& dir, std::span<const FlowState> snapshots) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& s = snapshots[k];
    std::ostringstream name;
    name << "snapshot_" << std::setw(4) << std::setfill('0') << k << ".csv";
    save_polyline(dir / name.str(), s.curve);
    nlohmann::json row{{"t", s.time},
                       {"length", polyline_length(s.curve)},
                       {"vertex_count", s.curve.size()},
                       {"file", name.str()}};
    row["area"] = s.curve.closed() ? nlohmann::json(signed_area(s.curve)) : nlohmann::json(nullptr);
    manifest.push_back(row);
  }
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

FlowParams flow_params_from_json(const nlohmann::json& j) {
  try {
    FlowParams p;
    p.cfl = j.value("cfl", p.cfl);
    p.remesh_lo = j.value("remesh_lo", p.remesh_lo);
    p.remesh_hi = j.value("remesh_hi", p.remesh_hi);
    p.angle = j.value("angle", p.angle);
    p.h_floor_ratio = j.value("h_floor_ratio", p.h_floor_ratio);
    p.grading = j.value("grading", p.grading);
    p.max_halvings = j.value("max_halvings", p.max_halvings);
    p.extinction_factor = j.value("extinction_factor", p.extinction_factor);
    p.turning_correction = j.value("turning_correction", p.turning_correction);
    const std::string b = j.value("boundary", std::string("fixed"));
    if (b == "fixed") p.boundary = Boundary::FixedEndpoint;
    else if (b == "free") p.boundary = Boundary::Free;
    else fail(ErrorKind::InvalidInput, "boundary must be fixed or free");
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad flow config: ") + e.what());
  }
}

nlohmann::json to_json(const FlowParams& p) {
  return {{"cfl", p.cfl},
          {"remesh_lo", p.remesh_lo},
          {"remesh_hi", p.remesh_hi},
          {"angle", p.angle},
          {"h_floor_ratio", p.h_floor_ratio},
          {"grading", p.grading},
          {"max_halvings", p.max_halvings},
          {"extinction_factor", p.extinction_factor},
          {"turning_correction", p.turning_correction},
          {"boundary", p.boundary == Boundary::Free ? "free" : "fixed"}};
}

}  // namespace sineflow
