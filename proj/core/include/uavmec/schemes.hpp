#pragma once

#include "uavmec/convex.hpp"
#include "uavmec/energy.hpp"
#include "uavmec/problems.hpp"
#include "uavmec/scenario.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

/// The scenario (or a subproblem) admits no feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver breakdown that leaves no usable iterate.
class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  double sca_tol = 1e-4;     // relative decrease of the true objective
  int sca_max_iter = 30;     // subproblems per SCA run
  int outer_max_iter = 15;   // alternations for One-by-One and NOMA
  int stage_max_iter = 3;    // SCA subproblems per alternation stage
  SolverOptions inner;
  bool relax_budget = false;
  bool relax_causality = false;
  double rounding_threshold = 0.5;

  /// Throws std::invalid_argument on non-positive tolerances or theta outside (0,1).
  void validate() const;
  BuildFlags flags() const { return {relax_budget, relax_causality}; }
};

/// Largest violation of each constraint family, in scaled units: meters and
/// m/s for kinematics, fractions of the limit for speed, acceleration,
/// power and budget, units of 1e6 bits for bit bookkeeping, bits/s/Hz for
/// rates.
struct PlanAudit {
  double kinematics = 0.0;
  double boundary = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double causality = 0.0;
  double totals = 0.0;
  double nonnegativity = 0.0;
  double budget = 0.0;
  double power = 0.0;
  double rate = 0.0;
  double schedule = 0.0;
  double partition = 0.0;

  double worst() const;
  std::vector<std::pair<std::string, double>> items() const;
};

/// Checks a plan pair against the original problem of `scheme`. Relaxed
/// constraints are skipped. `binary_schedule` additionally demands x in {0,1}.
PlanAudit audit_plan(const ScenarioConfig& cfg, const Iterate& it, Scheme scheme, const BuildFlags& flags,
                     bool binary_schedule = false);

inline constexpr double kFeasibilityTol = 1e-6;

struct SolutionBundle {
  std::string tag;  // scheme name, or "propulsion-baseline"
  Scheme access = Scheme::Tdma;
  TrajectoryPlan traj;
  OffloadPlan offload;
  EnergyBreakdown energy;
  std::vector<double> trace;  // true total (J) of the start and of every accepted iterate
  PlanAudit audit;
  int subproblems = 0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  double wall_seconds = 0.0;
  std::string status;  // converged | iteration-limit | stalled | rounding-infeasible
  double relaxed_total = 0.0;  // One-by-One: total before rounding
  std::vector<std::string> notes;

  Iterate iterate() const { return {traj, offload}; }
};

using SubproblemFactory = std::function<Subproblem(const Iterate&)>;

/// Successive convex approximation from `init`. An iterate is accepted only
/// when it passes the audit and does not raise the true objective; the run
/// stops on a relative decrease below sca_tol, on a rejected iterate, or
/// after `max_iter` subproblems. With `init_feasible` false the first
/// audited candidate is accepted unconditionally (used after rounding).
SolutionBundle sca_drive(const ScenarioConfig& cfg, Scheme scheme, const SubproblemFactory& factory,
                         const Iterate& init, const SolveOptions& opts, int max_iter, bool init_feasible = true);

SolutionBundle solve_tdma(const ScenarioConfig& cfg, const SolveOptions& opts = {});
SolutionBundle solve_ofdma(const ScenarioConfig& cfg, const SolveOptions& opts = {});
SolutionBundle solve_one_by_one(const ScenarioConfig& cfg, const SolveOptions& opts = {});
SolutionBundle solve_noma(const ScenarioConfig& cfg, const SolveOptions& opts = {});
SolutionBundle solve_propulsion_baseline(const ScenarioConfig& cfg, const SolveOptions& opts = {});

/// Dispatch by name: tdma, ofdma, one-by-one, noma, propulsion-baseline.
SolutionBundle solve_by_name(const std::string& name, const ScenarioConfig& cfg, const SolveOptions& opts = {});

/// Per slot, the largest fraction wins the slot if it reaches theta; ties go
/// to the lowest index. `x[k][i]` is UAV k on slot i.
std::vector<std::vector<double>> round_schedule(const std::vector<std::vector<double>>& x, double theta);

/// Error-diffusion variant of round_schedule: each UAV's unrounded share is
/// carried into the next slot, so a relaxed schedule sitting at 1/K spreads
/// the slots round-robin instead of handing all of them to UAV 0. On a
/// single slot it agrees with round_schedule. This is what solve_one_by_one
/// uses.
std::vector<std::vector<double>> round_schedule_balanced(const std::vector<std::vector<double>>& x, double theta);

}  // namespace uavmec
