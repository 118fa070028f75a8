#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "sineflow/error.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

struct FlowState {
  Polyline curve;
  double time = 0.0;
  double mesh_h = 0.01;
};

enum class Boundary { FixedEndpoint, Free };

struct FlowParams {
  double cfl = 0.2;
  double remesh_lo = 0.5;
  double remesh_hi = 2.0;
  Boundary boundary = Boundary::FixedEndpoint;
  // Curvature-adaptive spacing: target = clamp(angle / |kappa|, h_floor_ratio * mesh_h, mesh_h).
  double angle = 0.25;
  double h_floor_ratio = 0.125;
  double grading = 0.5;
  int max_halvings = 20;
  double extinction_factor = 10.0;
  // Scales the curvature vector by theta / sin(theta) (theta the turning
  // angle), so that closed curves lose area at exactly 2 pi on uniform meshes.
  bool turning_correction = false;

  void validate() const;
};

/// Evolution stopped because the curve became shorter than the extinction
/// threshold; carries the last valid state.
class ExtinctionError : public Error {
 public:
  ExtinctionError(FlowState last, const std::string& what)
      : Error(ErrorKind::Extinct, what), last_(std::move(last)) {}
  const FlowState& last() const noexcept { return last_; }
  double time() const noexcept { return last_.time; }

 private:
  FlowState last_;
};

/// Menger curvature vector at vertex i: magnitude 1/R of the circle through
/// (i-1, i, i+1), pointing to its center. Zero for collinear triples.
Vec2 curvature_vector(const FlowState& state, std::size_t i);
Vec2 menger_vector(Point2 p, Point2 q, Point2 r);

/// Re-samples the curve to the curvature-adaptive spacing field.
Polyline adaptive_remesh(const Polyline& p, double mesh_h, const FlowParams& params);

/// One explicit Euler step with dt = cfl * (min edge)^2, capped by dt_max.
FlowState csf_step(const FlowState& state, const FlowParams& params, double dt_max = INFINITY);

FlowState evolve_to(const FlowState& state, double t_target, const FlowParams& params);

struct FlowOutcome {
  FlowState state;
  std::optional<double> extinct_at;
};

/// Element-wise evolve_to; runs members concurrently (SINEFLOW_THREADS caps threads).
std::vector<FlowOutcome> evolve_family(std::span<const FlowState> states, double t_target, const FlowParams& params);

/// Initial state: adaptive remesh of p at spacing mesh_h.
FlowState make_flow_state(const Polyline& p, double mesh_h, const FlowParams& params = {});

/// Evolves and records snapshots at the given times.
std::vector<FlowState> evolve_snapshots(const FlowState& state, std::span<const double> times,
                                        const FlowParams& params);

/// Numbered CSV files plus manifest.json [{t, length, area, vertex_count, file}].
nlohmann::json write_snapshots(const std::filesystem::path& dir, std::span<const FlowState> snapshots);

/// Missing keys keep their defaults; boundary is "fixed" or "free".
FlowParams flow_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FlowParams& p);

/// Thread count from SINEFLOW_THREADS (default: hardware concurrency).
unsigned worker_threads();

}  // namespace sineflow
