#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavmec {

using Vec2 = Eigen::Vector2d;

/// Boundary conditions and workload of a single UAV.
struct UavSpec {
  Vec2 init_pos{0.0, 0.0};
  Vec2 final_pos{0.0, 0.0};
  Vec2 init_vel{0.0, 0.0};
  Vec2 final_vel{0.0, 0.0};
  double task_bits = 0.0;

  bool operator==(const UavSpec&) const = default;
};

/// One problem instance. All quantities are SI; `ref_snr` is the linear
/// SNR at 1 m, i.e. the channel reference gain already divided by the noise
/// power.
struct ScenarioConfig {
  int num_uavs = 0;
  double horizon = 0.0;
  double slot = 0.0;
  double altitude = 0.0;
  double bandwidth = 0.0;
  double ref_snr = 0.0;
  double max_power = 0.0;
  double max_speed = 0.0;
  double max_accel = 0.0;
  double prop_c1 = 0.0;
  double prop_c2 = 0.0;
  double gravity = 9.8;
  double comp_coeff = 0.0;
  double tbs_budget = 0.0;
  Vec2 tbs_position{0.0, 0.0};
  std::vector<UavSpec> uavs;

  /// Number of interior grid points N; the grid has N+2 points 0..N+1.
  int slot_count() const;

  bool operator==(const ScenarioConfig&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document: bad JSON, wrong types, unknown or missing keys.
class ScenarioParseError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// Well-formed document that violates one or more invariants.
class ScenarioValidationError : public ScenarioError {
 public:
  explicit ScenarioValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Slot count N = T/delta - 1. Throws ScenarioError("T/delta not integral")
/// when the ratio is not an integer, or when it is below 3.
int discretize(double horizon, double slot);

/// Names of every violated invariant; empty when the config is valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

/// Non-fatal remarks (e.g. unequal boundary speeds, whose kinetic-energy
/// change is not part of the objective).
std::vector<std::string> scenario_warnings(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

/// The two-UAV reference instance used throughout the test-suite and docs.
ScenarioConfig reference_scenario();

// ---------------------------------------------------------------------------
// Plans

/// Grid sequences for one UAV, indexed 0..N+1.
struct UavTrajectory {
  std::vector<Vec2> pos;
  std::vector<Vec2> vel;
  std::vector<Vec2> acc;
};

struct TrajectoryPlan {
  std::vector<UavTrajectory> uavs;
};

/// Offloading decisions for one UAV. Index i of every vector corresponds to
/// uplink slot n = i+1 (n in 1..N-1); `processed_bits[i]` is the amount the
/// base station processes in slot n+1.
struct UavOffload {
  std::vector<double> uplink_bits;
  std::vector<double> processed_bits;
  std::vector<double> power;
  std::vector<double> schedule;
  double partition = 1.0;
};

struct OffloadPlan {
  std::vector<UavOffload> uavs;
};

/// All-local plan: rho = 1, no bits, no power, schedule `schedule_value`.
OffloadPlan all_local_offload(const ScenarioConfig& cfg, double schedule_value = 1.0);

}  // namespace uavmec
