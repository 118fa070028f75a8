#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sineflow/curves.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

struct CoverEstimate {
  double delta = 0.0;
  int center_count = 0;
  double h1_delta = 0.0;  // 2 delta * center_count
  std::vector<Point2> centers;
  double length = 0.0;
  int count_bound = 0;  // ceil(2 L / delta)
  int slack = 0;        // 1 for the endpoint of an open curve or a short closing arc
  bool within_bound = false;
};

/// Centers along p, each the first exit of the curve from the open ball of
/// radius eps/2 around the previous one, so consecutive centers are eps/2
/// apart and every arc stays in the ball around its starting center.
CoverEstimate h1_cover_points(const Polyline& p, double eps);

struct AnnulusState {
  FlowState inner;
  FlowState outer;
  double area = 0.0;
};

struct AnnulusCheck {
  double area = 0.0;
  double gap = 0.0;  // distance between the boundary curves
  bool degenerate = false;  // the two curves coincide
};

/// Throws InvalidState unless inner lies strictly inside the outer region.
/// Coinciding curves are accepted and flagged with area 0.
AnnulusCheck check_annulus(const AnnulusState& st);
double annulus_area(const AnnulusState& st);
AnnulusState make_annulus(FlowState inner, FlowState outer);

struct LevelsetOptions {
  double mesh_h = 0.01;
  FlowParams flow{.turning_correction = true};
  std::vector<Point2> probes{{0.0, -0.5}, {0.0, 0.0}, {0.0, 0.5}};
  double probe_eps = 0.1;
};

struct LevelsetRow {
  int n = 0;
  double area0 = 0.0;
  double area = 0.0;
  double dH0 = 0.0;
  double dH = 0.0;
  std::vector<double> local_lengths;  // one per probe
  double kappa_max = 0.0;
  std::size_t inner_vertices = 0;
};

struct LevelsetReport {
  double t = 0.0;
  int N = 0;
  std::vector<LevelsetRow> rows;
  std::vector<std::pair<int, std::string>> dropped;
  std::vector<Point2> probes;
  double probe_eps = 0.0;
  /// Boundary of the innermost surviving annulus at t.
  std::optional<AnnulusState> innermost;
};

/// Evolves (gamma_n, beta_n), n = 1..N, to t and tabulates annulus area,
/// Hausdorff distance and local lengths of gamma_n near the probes.
LevelsetReport levelset_snapshot(const TSCSpec& tsc, const ApproxSpec& spec, int N, double t,
                                 const LevelsetOptions& opt = {});

nlohmann::json to_json(const CoverEstimate& c);
nlohmann::json to_json(const LevelsetReport& r);

}  // namespace sineflow
