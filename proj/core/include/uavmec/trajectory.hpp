#pragma once

#include "uavmec/scenario.hpp"

#include <span>

namespace uavmec {

/// Rolls the discrete double-integrator forward from (q0, v0) with
/// accelerations a[0..N]. Returns sequences of length N+2; acc[N+1] is zero.
UavTrajectory integrate_kinematics(const Vec2& q0, const Vec2& v0, std::span<const Vec2> accel,
                                   double slot);

/// Minimum-acceleration-energy plan that meets every boundary condition
/// exactly; interior via points are added when the direct solution would
/// come close to hovering. Throws ScenarioError if the resulting plan breaks
/// the speed or acceleration limits.
TrajectoryPlan straight_line_init(const ScenarioConfig& cfg);

struct TrajectoryAudit {
  double kinematics = 0.0;  // meters or m/s
  double boundary = 0.0;
  double speed_excess = 0.0;
  double accel_excess = 0.0;
  double min_speed = 0.0;  // over n in 1..N

  double worst() const;
};

TrajectoryAudit audit_trajectory(const ScenarioConfig& cfg, const TrajectoryPlan& plan);

/// Smallest distance between the segment [a, b] and the point p.
double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p);

}  // namespace uavmec
