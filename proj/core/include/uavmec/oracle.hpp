#pragma once

#include "uavmec/energy.hpp"
#include "uavmec/scenario.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace uavmec {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling of the brute-force search. Every axis includes its endpoints, so
/// refined() produces a grid that contains the original one.
struct GridSpec {
  int waypoint_points = 5;       // per coordinate of each free waypoint
  double waypoint_span = 2.0;    // half-width (m) of the box around the straight-line waypoint
  int partition_points = 5;      // rho from 1 down to 0
  int split_points = 5;          // uplink split and processed split between slots
  double feasibility_tol = 1e-9; // on budget and power, relative to the limit
  std::int64_t max_points = 10'000'000;

  /// Each axis doubled: n points become 2n - 1.
  GridSpec refined() const;
  /// Throws OracleError when a count is below 2 or the span is not positive.
  void validate() const;
};

struct GridResult {
  TrajectoryPlan traj;
  OffloadPlan offload;
  EnergyBreakdown energy;
  std::int64_t enumerated = 0;
  std::int64_t feasible = 0;
};

/// Enumeration size for `cfg` under `spec`.
std::int64_t grid_size(const ScenarioConfig& cfg, const GridSpec& spec);

/// Exhaustive search over a K = 1, N <= 3 instance. The free interior
/// waypoints are gridded around the straight-line plan; the last two
/// accelerations are recovered from the terminal conditions. Bits are split
/// on a grid that respects causality by construction and powers meet the
/// rate with equality. Ties keep the first plan in enumeration order.
/// Throws OracleError on an oversized grid or when nothing is feasible.
GridResult grid_search_tiny(const ScenarioConfig& cfg, Scheme scheme, const GridSpec& spec = {});

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Central differences with step h * max(1, |z_i|) per coordinate.
Eigen::VectorXd finite_diff_grad(const ScalarField& f, const Eigen::VectorXd& z, double h = 1e-6);

}  // namespace uavmec
