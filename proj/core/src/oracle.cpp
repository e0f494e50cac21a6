#include "uavmec/oracle.hpp"

#include "uavmec/trajectory.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace uavmec {

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  g.waypoint_points = 2 * waypoint_points - 1;
  g.partition_points = 2 * partition_points - 1;
  g.split_points = 2 * split_points - 1;
  return g;
}

void GridSpec::validate() const {
  if (waypoint_points < 2 || partition_points < 2 || split_points < 2) {
    throw OracleError("grid axes need at least 2 points");
  }
  if (!(waypoint_span > 0.0)) throw OracleError("waypoint span must be positive");
  if (!(feasibility_tol >= 0.0)) throw OracleError("feasibility tolerance must be non-negative");
}

namespace {

double axis(int i, int count, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / b) return std::numeric_limits<std::int64_t>::max();
    r *= b;
  }
  return r;
}

// Interior waypoints 1..N-1 fix accelerations 0..N-2; the last two follow
// from the terminal position and velocity.
UavTrajectory complete_path(const UavSpec& u, const std::vector<Vec2>& waypoints, double d) {
  std::vector<Vec2> acc;
  Vec2 q = u.init_pos, v = u.init_vel;
  for (const Vec2& next : waypoints) {
    const Vec2 a = 2.0 * (next - q - v * d) / (d * d);
    acc.push_back(a);
    q = next;
    v += a * d;
  }
  const Vec2 r1 = (u.final_pos - q - 2.0 * v * d) / (d * d);
  const Vec2 r2 = (u.final_vel - v) / d;
  const Vec2 a1 = r1 - 0.5 * r2;
  acc.push_back(a1);
  acc.push_back(r2 - a1);
  return integrate_kinematics(u.init_pos, u.init_vel, acc, d);
}

}  // namespace

std::int64_t grid_size(const ScenarioConfig& cfg, const GridSpec& spec) {
  const int n = cfg.slot_count();
  const int free_coords = 2 * (n - 1);
  const int uplink_slots = n - 1;
  const int split_axes = uplink_slots >= 2 ? 2 : 0;
  std::int64_t total = ipow(spec.waypoint_points, free_coords);
  for (std::int64_t f : {ipow(spec.partition_points, 1), ipow(spec.split_points, split_axes)}) {
    if (total > std::numeric_limits<std::int64_t>::max() / f) return std::numeric_limits<std::int64_t>::max();
    total *= f;
  }
  return total;
}

GridResult grid_search_tiny(const ScenarioConfig& cfg, Scheme scheme, const GridSpec& spec) {
  spec.validate();
  if (auto bad = validate(cfg); !bad.empty()) throw ScenarioValidationError(std::move(bad));
  if (cfg.num_uavs != 1) throw OracleError("grid search needs K = 1");
  const int n = cfg.slot_count();
  if (n > 3) throw OracleError("grid search needs N <= 3, got " + std::to_string(n));
  const std::int64_t size = grid_size(cfg, spec);
  if (size > spec.max_points) {
    throw OracleError("enumeration of " + std::to_string(size) + " points exceeds the cap of " +
                      std::to_string(spec.max_points));
  }

  const UavSpec& u = cfg.uavs[0];
  const double d = cfg.slot;
  const double lk = u.task_bits;
  const int S = n - 1;
  const int free_coords = 2 * (n - 1);
  // The reference waypoints come from the straight-line plan, which may
  // itself be infeasible; only the grid box matters here.
  TrajectoryPlan center_plan;
  try {
    center_plan = straight_line_init(cfg);
  } catch (const ScenarioError&) {
    std::vector<Vec2> acc(static_cast<std::size_t>(n + 1), Vec2::Zero());
    center_plan.uavs.push_back(integrate_kinematics(u.init_pos, u.init_vel, acc, d));
    for (int i = 1; i < n; ++i) {
      center_plan.uavs[0].pos[i] = u.init_pos + (u.final_pos - u.init_pos) * (static_cast<double>(i) / (n + 1));
    }
  }
  const auto& center = center_plan.uavs[0].pos;

  // An OFDMA channel at K = 1 is the full band for the full slot, the same
  // link NOMA sees without interferers.
  const AccessParams access = access_params(scheme == Scheme::Noma ? Scheme::Ofdma : scheme, cfg);
  const PropulsionCoeffs coeffs = propulsion_coeffs(cfg);
  const int split_axes = S >= 2 ? 2 : 0;
  const std::int64_t traj_count = ipow(spec.waypoint_points, free_coords);
  const std::int64_t split_count = ipow(spec.split_points, split_axes);

  GridResult best;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<int> digits(static_cast<std::size_t>(free_coords), 0);

  for (std::int64_t ti = 0; ti < traj_count; ++ti) {
    std::int64_t rest = ti;
    for (int c = free_coords - 1; c >= 0; --c) {
      digits[c] = static_cast<int>(rest % spec.waypoint_points);
      rest /= spec.waypoint_points;
    }
    std::vector<Vec2> wps;
    for (int w = 0; w < n - 1; ++w) {
      const Vec2& c0 = center[w + 1];
      wps.emplace_back(axis(digits[2 * w], spec.waypoint_points, c0.x() - spec.waypoint_span, c0.x() + spec.waypoint_span),
                       axis(digits[2 * w + 1], spec.waypoint_points, c0.y() - spec.waypoint_span,
                            c0.y() + spec.waypoint_span));
    }
    best.enumerated += spec.partition_points * split_count;

    TrajectoryPlan plan;
    plan.uavs.push_back(complete_path(u, wps, d));
    const TrajectoryAudit ta = audit_trajectory(cfg, plan);
    if (ta.speed_excess > 0.0 || ta.accel_excess > 0.0 || ta.min_speed < kHoverFloor) continue;
    const auto& t = plan.uavs[0];
    const double fly = propulsion_energy(std::span(t.vel).subspan(1, n), std::span(t.acc).subspan(1, n), coeffs, d);
    std::vector<double> inv(static_cast<std::size_t>(S));
    for (int i = 0; i < S; ++i) inv[i] = inv_snr(t.pos[i + 1], cfg.tbs_position, cfg.altitude, cfg.ref_snr);

    for (int pi = 0; pi < spec.partition_points; ++pi) {
      const double rho = S == 0 ? 1.0 : axis(pi, spec.partition_points, 1.0, 0.0);
      const double sent = (1.0 - rho) * lk;
      const double comp = comp_energy(rho * lk, cfg.horizon, cfg.comp_coeff);
      for (std::int64_t si = 0; si < split_count; ++si) {
        std::vector<double> up(static_cast<std::size_t>(S), 0.0), proc(static_cast<std::size_t>(S), 0.0);
        if (S == 1) {
          up[0] = proc[0] = sent;
        } else if (S == 2) {
          const double f_up = axis(static_cast<int>(si / spec.split_points), spec.split_points, 0.0, 1.0);
          const double f_proc = axis(static_cast<int>(si % spec.split_points), spec.split_points, 0.0, 1.0);
          up[0] = f_up * sent;
          up[1] = sent - up[0];
          proc[0] = f_proc * up[0];
          proc[1] = sent - proc[0];
        }
        double budget = 0.0;
        for (double l : proc) budget += cfg.comp_coeff * l * l * l / (d * d);
        if (budget > cfg.tbs_budget + spec.feasibility_tol * std::max(cfg.tbs_budget, 1.0)) continue;

        std::vector<double> power(static_cast<std::size_t>(S), 0.0);
        double comm = 0.0;
        bool ok = true;
        for (int i = 0; i < S && ok; ++i) {
          if (up[i] <= 0.0) continue;
          try {
            power[i] = required_power(up[i], access.bandwidth, access.duration, inv[i]);
          } catch (const EnergyError&) {
            ok = false;
            break;
          }
          ok = power[i] <= cfg.max_power * (1.0 + spec.feasibility_tol);
          comm += comm_energy(power[i], scheme == Scheme::Tdma ? access.duration : d);
        }
        if (!ok) continue;
        ++best.feasible;
        const double total = fly + comp + comm;
        if (total < best_total) {
          best_total = total;
          best.traj = plan;
          UavOffload o;
          o.uplink_bits = up;
          o.processed_bits = proc;
          o.power = power;
          o.schedule.assign(static_cast<std::size_t>(S), 1.0);
          o.partition = rho;
          best.offload.uavs.assign(1, o);
        }
      }
    }
  }
  if (!std::isfinite(best_total)) throw OracleError("no feasible grid point");
  best.energy = total_energy(cfg, best.traj, best.offload, scheme);
  return best;
}

Eigen::VectorXd finite_diff_grad(const ScalarField& f, const Eigen::VectorXd& z, double h) {
  Eigen::VectorXd g(z.size());
  Eigen::VectorXd w = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(z[i]));
    w[i] = z[i] + step;
    const double up = f(w);
    w[i] = z[i] - step;
    const double down = f(w);
    w[i] = z[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

}  // namespace uavmec
