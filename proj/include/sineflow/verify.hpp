#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"
#include "sineflow/curves.hpp"

namespace sineflow {

/// Outcome of a property suite. `detail` carries counts and, on failure, the
/// first witnesses.
struct VerifyResult {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

/// Certificate plus brute-force crossing count (expected 1) on each (c, lambda).
VerifyResult verify_intersect_lemma(std::span<const double> c_grid, std::span<const double> lambda_grid);

/// Random interval families: sum of lengths <= M L.
VerifyResult verify_straight2(std::uint64_t seed, int trials = 10000);

/// Random clipped polylines: L <= 4 M eps with measured M.
VerifyResult verify_straight(std::uint64_t seed, int trials = 1000);

/// Shears over a theta grid and grim-reaper flattenings: L <= 4 M d^2 eps.
VerifyResult verify_jacobian(std::uint64_t seed, int trials = 1000);

/// Random lines away from V: |gamma_n ∩ l| <= 2 |T ∩ l| for n in [ceil(N/2), N].
VerifyResult verify_intbound(const TSCSpec& tsc, const ApproxSpec& spec, int n_max, std::uint64_t seed,
                             int lines = 200, double min_distance = 0.05);

/// dA/dt = -2 pi within tol over [0, dt] for a circle, an ellipse and gamma_3.
VerifyResult verify_area_law(double mesh_h = 0.005, double dt = 0.01, double tol = 0.02);

/// Random disjoint nested pairs stay disjoint under simultaneous evolution.
VerifyResult verify_avoidance(std::uint64_t seed, int pairs = 50, double mesh_h = 0.01, int checkpoints = 10);

nlohmann::json to_json(const VerifyResult& r);

}  // namespace sineflow
