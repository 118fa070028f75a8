#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

struct CrossingCount {
  int count = 0;
  bool uncertain = false;
};

/// Transversal crossings between two polylines. Raw hits closer than 10*tau
/// are merged; each merged hit is classified as crossing or touch by a local
/// side test. Tangential or near-endpoint contacts set `uncertain`.
CrossingCount count_crossings(const Polyline& a, const Polyline& b, double tau = 1e-9);

/// Crossings with an exact line via sign changes of the signed distance.
CrossingCount count_line_crossings(const Polyline& p, const LineSpec& l, double tau = 1e-9);

/// Maximum number of crossings over all vertical (or horizontal) lines, found
/// by sweeping the distinct vertex coordinates and the midpoints between them.
struct AxisSweep {
  int max_count = 0;
  double at = 0.0;          // coordinate of a maximizing line
  bool degenerate = false;  // some edge lies on a swept line
};
AxisSweep max_vertical_crossings(std::span<const Polyline> pieces);
AxisSweep max_horizontal_crossings(std::span<const Polyline> pieces);
inline AxisSweep max_vertical_crossings(const Polyline& p) { return max_vertical_crossings({&p, 1}); }
inline AxisSweep max_horizontal_crossings(const Polyline& p) { return max_horizontal_crossings({&p, 1}); }

struct MonitorSample {
  double t = 0.0;
  int count = 0;
  bool uncertain = false;
};

struct MonitorReport {
  std::vector<MonitorSample> samples;
  bool violation = false;
  std::optional<std::size_t> violation_index;  // first sample of a persistent increase
  bool non_increasing() const { return !violation; }
};

using PairProvider = std::function<std::pair<Polyline, Polyline>(double)>;

/// Counts crossings along the given times. A violation is an increase over the
/// running minimum that persists for two consecutive samples, both certain.
MonitorReport monotonicity_monitor(std::span<const double> times, const PairProvider& pairs, double tau = 1e-9);
MonitorReport monotonicity_monitor(std::vector<MonitorSample> samples);

nlohmann::json to_json(const MonitorReport& r);

}  // namespace sineflow
