#pragma once

#include "uavmec/schemes.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace uavmec {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

std::string tool_version();

/// SHA-256 (hex) of the scenario's canonical JSON; insensitive to key order
/// and number spelling in the source document.
std::string scenario_digest(const ScenarioConfig& cfg);

/// Full solve report as JSON text: scenario, options, energy, partitions,
/// audit, trace and the plans. Contains nothing run-dependent, so equal
/// inputs give byte-equal output.
std::string bundle_json(const ScenarioConfig& cfg, const std::string& scheme, const SolveOptions& opts,
                        const SolutionBundle& b);

/// uav,n,t_s,x_m,y_m,... one row per grid point.
std::string trajectory_csv(const ScenarioConfig& cfg, const TrajectoryPlan& traj);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double v);

/// Solves one scheme and writes result.json and trajectory.csv into
/// `out_dir`. Returns kExitOk, kExitInfeasible (scenario or rounding
/// infeasible) or kExitError; diagnostics go to `err`. Nothing is written
/// unless a plan was produced.
int cmd_solve(const std::filesystem::path& scenario_path, const std::string& scheme, const SolveOptions& opts,
              const std::filesystem::path& out_dir, std::ostream& err);

enum class SweepAxis { Budget, Horizon };
SweepAxis parse_axis(const std::string& name);

struct SweepOptions {
  SweepAxis axis = SweepAxis::Budget;
  std::vector<double> values;
  std::vector<std::string> schemes{"tdma"};
  SolveOptions solve;
  int max_slots = 60;        // horizon axis: delta grows until N fits
  bool keep_slot = false;    // horizon axis: never rescale delta
  int jobs = 1;
};

/// Scenario for one sweep cell. The horizon axis keeps delta when N fits
/// within max_slots and otherwise uses delta = T / (max_slots + 1).
ScenarioConfig sweep_cell_scenario(const ScenarioConfig& base, const SweepOptions& opts, double value);

struct SweepRow {
  double value = 0.0;
  std::string scheme;
  std::string status;  // bundle status, "infeasible" or "error"
  double delta = 0.0;
  EnergyBreakdown energy;
  std::vector<double> offloaded;  // 1 - rho per UAV
  std::string message;
};

/// Runs every (value, scheme) cell, persisting each cell's result.json,
/// trajectory.csv and RunRecord under `out_dir`, appends to
/// out_dir/index.csv and writes out_dir/sweep.csv. Failed cells become rows
/// with an error status. Returns the rows in (value, scheme) order.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepOptions& opts,
                                const std::filesystem::path& out_dir, std::ostream& err);

std::string sweep_csv(const std::vector<SweepRow>& rows, int num_uavs);

int cmd_sweep(const std::filesystem::path& scenario_path, const SweepOptions& opts,
              const std::filesystem::path& out_dir, std::ostream& err);

/// Gathers result.json files (given directly or found under directories,
/// in sorted path order) and writes the plot table for figure f2..f6.
/// Throws std::runtime_error on an unknown figure or when no record is
/// found; in that case no file is written.
std::string export_plotdata(const std::vector<std::filesystem::path>& inputs, const std::string& figure);

int cmd_export_plotdata(const std::vector<std::filesystem::path>& inputs, const std::string& figure,
                        const std::filesystem::path& out_file, std::ostream& err);

}  // namespace uavmec
