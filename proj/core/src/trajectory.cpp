#include "uavmec/trajectory.hpp"

#include "uavmec/convex.hpp"
#include "uavmec/energy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace uavmec {

namespace {

struct ViaPoint {
  int index;  // grid point index in 1..N
  Vec2 target;
};

// Minimum sum ||a||^2 over a[0..N] subject to terminal state and via points.
std::vector<Vec2> min_accel_profile(const UavSpec& u, int n_slots, double slot,
                                    const std::vector<ViaPoint>& via) {
  const int steps = n_slots + 1;
  const int rows = 2 + static_cast<int>(via.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, steps);
  Eigen::MatrixXd rhs(rows, 2);

  for (int i = 0; i < steps; ++i) c(0, i) = slot;
  rhs.row(0) = (u.final_vel - u.init_vel).transpose();

  auto position_row = [&](int row, int m, const Vec2& target) {
    for (int i = 0; i < m; ++i) c(row, i) = slot * slot * (m - i - 0.5);
    rhs.row(row) = (target - u.init_pos - m * slot * u.init_vel).transpose();
  };
  position_row(1, steps, u.final_pos);
  for (std::size_t j = 0; j < via.size(); ++j) position_row(2 + static_cast<int>(j), via[j].index, via[j].target);

  const Eigen::MatrixXd gram = c * c.transpose();
  const Eigen::MatrixXd lambda = gram.ldlt().solve(rhs);
  const Eigen::MatrixXd a = c.transpose() * lambda;

  std::vector<Vec2> accel(steps);
  for (int i = 0; i < steps; ++i) accel[i] = Vec2(a(i, 0), a(i, 1));
  return accel;
}

struct Profile {
  double max_speed = 0.0;
  double max_accel = 0.0;
  double min_speed = 0.0;
};

Profile profile_of(const UavTrajectory& t, int n_slots) {
  Profile p;
  p.min_speed = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_slots; ++n) {
    p.max_speed = std::max(p.max_speed, t.vel[n].norm());
    p.max_accel = std::max(p.max_accel, t.acc[n].norm());
    if (n >= 1) p.min_speed = std::min(p.min_speed, t.vel[n].norm());
  }
  return p;
}

// Below this interior speed the direct solution is replaced by a loop.
constexpr double kLoiterSpeed = 1.0;

// Limits are enforced with this much headroom so the SCA start is interior.
constexpr double kLimitMargin = 0.995;

// Short horizons make the unconstrained minimum-acceleration plan break the
// limits even when a feasible plan exists. Re-solve with the speed and
// acceleration limits as explicit convex constraints.
std::optional<UavTrajectory> limited_profile(const ScenarioConfig& cfg, const UavSpec& u, int n_slots,
                                             const std::vector<Vec2>& start) {
  const int steps = n_slots + 1;
  const double d = cfg.slot;
  const double as = cfg.max_accel;  // accelerations are scaled by a_max
  ConvexProgram prog;
  const int off = prog.add_block("acc", 2 * steps, -1.0, 1.0);
  Eigen::VectorXd z0(2 * steps);
  for (int i = 0; i < steps; ++i) {
    z0[2 * i] = start[i].x() / as;
    z0[2 * i + 1] = start[i].y() / as;
  }
  prog.set_initial_point(z0);
  std::vector<AffineExpr> all;
  for (int i = 0; i < 2 * steps; ++i) all.push_back(AffineExpr::variable(off + i));
  prog.add_objective(Atom::sum_squares(all, 1.0 / steps));

  AffineExpr vx(u.init_vel.x() / cfg.max_speed), vy(u.init_vel.y() / cfg.max_speed);
  AffineExpr px((u.init_pos.x() - u.final_pos.x()) / 1e3), py((u.init_pos.y() - u.final_pos.y()) / 1e3);
  const double lim2 = kLimitMargin * kLimitMargin;
  for (int n = 0; n < steps; ++n) {
    const AffineExpr ax = AffineExpr::variable(off + 2 * n), ay = AffineExpr::variable(off + 2 * n + 1);
    prog.add_constraint("accel", {Atom::sum_squares({ax, ay}), Atom::affine(AffineExpr(-lim2))});
    px += vx * (d * cfg.max_speed / 1e3) + ax * (0.5 * as * d * d / 1e3);
    py += vy * (d * cfg.max_speed / 1e3) + ay * (0.5 * as * d * d / 1e3);
    vx += ax * (as * d / cfg.max_speed);
    vy += ay * (as * d / cfg.max_speed);
    if (n + 1 < steps) prog.add_constraint("speed", {Atom::sum_squares({vx, vy}), Atom::affine(AffineExpr(-lim2))});
  }
  prog.add_equality("final vx", vx - u.final_vel.x() / cfg.max_speed);
  prog.add_equality("final vy", vy - u.final_vel.y() / cfg.max_speed);
  prog.add_equality("final x", px);
  prog.add_equality("final y", py);

  const SolveResult r = solve_convex(prog);
  if (!r.strictly_feasible) return std::nullopt;
  std::vector<Vec2> accel(steps);
  for (int i = 0; i < steps; ++i) accel[i] = Vec2(r.z[off + 2 * i], r.z[off + 2 * i + 1]) * as;
  return integrate_kinematics(u.init_pos, u.init_vel, accel, d);
}

}  // namespace

UavTrajectory integrate_kinematics(const Vec2& q0, const Vec2& v0, std::span<const Vec2> accel,
                                   double slot) {
  const std::size_t points = accel.size() + 1;
  UavTrajectory t;
  t.pos.resize(points);
  t.vel.resize(points);
  t.acc.assign(points, Vec2::Zero());
  t.pos[0] = q0;
  t.vel[0] = v0;
  for (std::size_t n = 0; n < accel.size(); ++n) {
    t.acc[n] = accel[n];
    t.pos[n + 1] = t.pos[n] + t.vel[n] * slot + 0.5 * accel[n] * slot * slot;
    t.vel[n + 1] = t.vel[n] + accel[n] * slot;
  }
  return t;
}

TrajectoryPlan straight_line_init(const ScenarioConfig& cfg) {
  if (auto bad = validate(cfg); !bad.empty()) throw ScenarioValidationError(std::move(bad));
  const int n_slots = cfg.slot_count();
  TrajectoryPlan plan;

  for (std::size_t k = 0; k < cfg.uavs.size(); ++k) {
    const UavSpec& u = cfg.uavs[k];
    auto accel = min_accel_profile(u, n_slots, cfg.slot, {});
    UavTrajectory traj = integrate_kinematics(u.init_pos, u.init_vel, accel, cfg.slot);
    Profile prof = profile_of(traj, n_slots);

    if (prof.min_speed < kLoiterSpeed) {
      // Two via points turn the path into a loop so the interior never hovers.
      Vec2 along = u.final_pos - u.init_pos;
      along = along.norm() > 1e-9 ? Vec2(along.normalized()) : Vec2(1.0, 0.0);
      const Vec2 across(-along.y(), along.x());
      const int i1 = std::max(1, (n_slots + 1) / 3);
      const int i2 = std::max(i1 + 1, 2 * (n_slots + 1) / 3);
      auto on_line = [&](int i) {
        return Vec2(u.init_pos + (u.final_pos - u.init_pos) * (static_cast<double>(i) / (n_slots + 1)));
      };
      double radius = cfg.max_speed * cfg.horizon / 16.0;
      bool found = false;
      for (int attempt = 0; attempt < 40 && !found; ++attempt, radius *= 0.5) {
        std::vector<ViaPoint> via = {{i1, on_line(i1) + radius * across},
                                     {i2, on_line(i2) + radius * along}};
        auto looped = min_accel_profile(u, n_slots, cfg.slot, via);
        UavTrajectory cand = integrate_kinematics(u.init_pos, u.init_vel, looped, cfg.slot);
        Profile cp = profile_of(cand, n_slots);
        if (cp.max_speed <= cfg.max_speed && cp.max_accel <= cfg.max_accel &&
            cp.min_speed >= kHoverFloor) {
          traj = std::move(cand);
          prof = cp;
          found = true;
        }
      }
      if (!found && prof.min_speed < kHoverFloor) {
        throw ScenarioError("uav " + std::to_string(k + 1) + ": no hover-free initial trajectory found");
      }
    }
    if (prof.max_speed > cfg.max_speed * (1 + 1e-12) || prof.max_accel > cfg.max_accel * (1 + 1e-12)) {
      if (auto lim = limited_profile(cfg, u, n_slots, accel)) {
        Profile lp = profile_of(*lim, n_slots);
        if (lp.max_speed <= cfg.max_speed && lp.max_accel <= cfg.max_accel && lp.min_speed >= kHoverFloor) {
          traj = std::move(*lim);
          prof = lp;
        }
      }
    }
    if (prof.max_speed > cfg.max_speed * (1 + 1e-12) || prof.max_accel > cfg.max_accel * (1 + 1e-12)) {
      throw ScenarioError("uav " + std::to_string(k + 1) +
                          ": infeasible endpoints (initial trajectory exceeds speed or acceleration limits)");
    }
    // Snap the terminal state; the linear solve leaves ~1e-12 residue.
    traj.pos.back() = u.final_pos;
    traj.vel.back() = u.final_vel;
    plan.uavs.push_back(std::move(traj));
  }
  return plan;
}

double TrajectoryAudit::worst() const {
  return std::max({kinematics, boundary, speed_excess, accel_excess});
}

TrajectoryAudit audit_trajectory(const ScenarioConfig& cfg, const TrajectoryPlan& plan) {
  const int n_slots = cfg.slot_count();
  const double d = cfg.slot;
  TrajectoryAudit audit;
  audit.min_speed = std::numeric_limits<double>::infinity();
  if (plan.uavs.size() != cfg.uavs.size()) throw ScenarioError("trajectory plan has wrong UAV count");
  for (std::size_t k = 0; k < plan.uavs.size(); ++k) {
    const auto& t = plan.uavs[k];
    const auto& u = cfg.uavs[k];
    if (static_cast<int>(t.pos.size()) != n_slots + 2 || t.vel.size() != t.pos.size() ||
        t.acc.size() != t.pos.size()) {
      throw ScenarioError("trajectory plan has wrong length");
    }
    for (int n = 0; n <= n_slots; ++n) {
      const Vec2 q_next = t.pos[n] + t.vel[n] * d + 0.5 * t.acc[n] * d * d;
      const Vec2 v_next = t.vel[n] + t.acc[n] * d;
      audit.kinematics = std::max({audit.kinematics, (q_next - t.pos[n + 1]).norm(), (v_next - t.vel[n + 1]).norm()});
      audit.speed_excess = std::max(audit.speed_excess, t.vel[n].norm() - cfg.max_speed);
      audit.accel_excess = std::max(audit.accel_excess, t.acc[n].norm() - cfg.max_accel);
      if (n >= 1) audit.min_speed = std::min(audit.min_speed, t.vel[n].norm());
    }
    audit.boundary = std::max({audit.boundary, (t.pos.front() - u.init_pos).norm(),
                               (t.pos.back() - u.final_pos).norm(), (t.vel.front() - u.init_vel).norm(),
                               (t.vel.back() - u.final_vel).norm()});
  }
  return audit;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

}  // namespace uavmec
