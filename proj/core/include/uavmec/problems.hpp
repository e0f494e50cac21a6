#pragma once

#include "uavmec/convex.hpp"
#include "uavmec/energy.hpp"
#include "uavmec/scenario.hpp"

#include <memory>

namespace uavmec {

/// A point of the original (non-convex) problem: the two plans. Slack
/// variables (tau, y, s) are rebuilt from the plans whenever a subproblem is
/// formed, which keeps every bound tight at the expansion point.
struct Iterate {
  TrajectoryPlan traj;
  OffloadPlan offload;
};

enum class SubproblemKind {
  Joint,           // trajectory + bits + power, orthogonal access (TDMA, OFDMA, One-by-One with x fixed)
  FixedTrajectory, // bits + power on a fixed trajectory, orthogonal access; exact (no bounds)
  Schedule,        // One-by-One: relaxed x, power, rate slack s, bits; trajectory fixed
  NomaTrajectory,  // NOMA: trajectory + bits with powers fixed
  NomaPower,       // NOMA: powers + bits with trajectory fixed
  FlyOnly,         // trajectory alone, propulsion objective
};

std::string subproblem_name(SubproblemKind kind);

struct BuildFlags {
  bool relax_budget = false;
  bool relax_causality = false;
};

// Unit scales of the decision variables.
inline constexpr double kBitScale = 1e6;     // bits
inline constexpr double kDistSqScale = 1e6;  // m^2
inline constexpr double kEnergyScale = 1e3;  // objective in kJ

/// One convexified subproblem formed around an iterate.
class Subproblem {
 public:
  Subproblem(const ScenarioConfig& cfg, SubproblemKind kind, Scheme access, const Iterate& at,
             const BuildFlags& flags);
  ~Subproblem();
  Subproblem(Subproblem&&) noexcept;
  Subproblem& operator=(Subproblem&&) noexcept;

  const ConvexProgram& program() const;
  SubproblemKind kind() const;

  /// Plans recovered from a solution vector. Trajectories are re-integrated
  /// from the accelerations; orthogonal powers are set to the power the
  /// decoded bits need on the decoded channel.
  Iterate decode(const Eigen::VectorXd& z) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Starting iterate: straight_line_init trajectory, all-local offloading,
/// zero power, schedule 1/K.
Iterate initial_iterate(const ScenarioConfig& cfg);

}  // namespace uavmec
