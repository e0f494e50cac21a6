#include "uavmec/problems.hpp"

#include "uavmec/sca_bounds.hpp"
#include "uavmec/trajectory.hpp"

#include <cmath>
#include <numbers>

namespace uavmec {

std::string subproblem_name(SubproblemKind kind) {
  switch (kind) {
    case SubproblemKind::Joint: return "joint";
    case SubproblemKind::FixedTrajectory: return "fixed-trajectory";
    case SubproblemKind::Schedule: return "schedule";
    case SubproblemKind::NomaTrajectory: return "noma-trajectory";
    case SubproblemKind::NomaPower: return "noma-power";
    case SubproblemKind::FlyOnly: return "fly-only";
  }
  return "unknown";
}

namespace {

constexpr double kLog2e = std::numbers::log2e;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct UavLayout {
  int acc = -1;  // a[i] at acc + 2i, acc + 2i + 1 for i = 0..N
  int tau = -1;  // tau for n = 1..N at tau + n - 1
  std::vector<int> y, up, proc, pow, x, s;  // per uplink slot i (n = i + 1); -1 when absent
  int rho = -1;
  std::vector<AffineVec2> pos, vel;  // n = 0..N+1
};

AffineVec2 constant_vec(const Vec2& v) { return {AffineExpr(v.x()), AffineExpr(v.y())}; }

std::vector<Atom> scaled(std::vector<Atom> atoms, double c) {
  for (auto& a : atoms) {
    if (a.kind == AtomKind::Affine) {
      a.args[0] *= c;
    } else {
      a.weight *= c;
    }
  }
  return atoms;
}

std::vector<int> block_indices(ConvexProgram& prog, const std::string& name, const std::vector<bool>& active,
                               double lo, double hi) {
  int count = 0;
  for (bool b : active) count += b ? 1 : 0;
  std::vector<int> idx(active.size(), -1);
  if (count == 0) return idx;
  int off = prog.add_block(name, count, lo, hi);
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) idx[i] = off++;
  }
  return idx;
}

}  // namespace

struct Subproblem::Impl {
  ScenarioConfig cfg;
  SubproblemKind kind;
  Scheme access;
  BuildFlags flags;
  Iterate at;
  int N = 0;
  bool traj_var = false;
  std::vector<UavLayout> lay;
  ConvexProgram prog;

  double slot_duration(int k, int i) const {
    switch (access) {
      case Scheme::Tdma: return cfg.slot / cfg.num_uavs;
      case Scheme::OneByOne: return at.offload.uavs[k].schedule[i] * cfg.slot;
      default: return cfg.slot;
    }
  }
  double slot_bandwidth() const { return access == Scheme::Ofdma ? cfg.bandwidth / cfg.num_uavs : cfg.bandwidth; }

  void build();
  Iterate decode(const Eigen::VectorXd& z) const;
};

void Subproblem::Impl::build() {
  const int K = cfg.num_uavs;
  N = cfg.slot_count();
  const int S = N - 1;  // uplink slots
  traj_var = kind == SubproblemKind::Joint || kind == SubproblemKind::NomaTrajectory ||
             kind == SubproblemKind::FlyOnly;
  const double delta = cfg.slot;
  const double P = cfg.max_power;
  const double H2 = cfg.altitude * cfg.altitude;
  const Vec2& w = cfg.tbs_position;
  lay.assign(static_cast<std::size_t>(K), {});

  // Which slots carry uplink bits, per UAV.
  std::vector<std::vector<bool>> active(static_cast<std::size_t>(K), std::vector<bool>(S, false));
  std::vector<bool> has_bits(static_cast<std::size_t>(K), false);
  for (int k = 0; k < K; ++k) {
    const auto& off = at.offload.uavs[k];
    const bool can_offload = cfg.uavs[k].task_bits > 0.0 && (cfg.tbs_budget > 0.0 || flags.relax_budget) &&
                             kind != SubproblemKind::FlyOnly;
    if (!can_offload) continue;
    for (int i = 0; i < S; ++i) {
      bool a = true;
      if ((kind == SubproblemKind::Joint || kind == SubproblemKind::FixedTrajectory) && access == Scheme::OneByOne) {
        a = off.schedule[i] > 0.0;
      }
      if (kind == SubproblemKind::NomaTrajectory) a = off.power[i] > 0.0;
      active[k][i] = a;
      if (a) has_bits[k] = true;
    }
  }

  // Variables.
  for (int k = 0; k < K; ++k) {
    UavLayout& L = lay[k];
    const std::string tag = std::to_string(k + 1);
    if (traj_var) {
      L.acc = prog.add_block("acc" + tag, 2 * (N + 1));
      L.tau = prog.add_block("tau" + tag, N, kHoverFloor);
    }
    if (has_bits[k]) {
      if (kind == SubproblemKind::Joint) L.y = block_indices(prog, "y" + tag, active[k], 0.0, kInfinity);
      L.up = block_indices(prog, "up" + tag, active[k], 0.0, kInfinity);
      std::vector<bool> proc_active(S, true);
      if (!flags.relax_causality) {
        int first = 0;
        while (!active[k][first]) ++first;
        for (int i = 0; i < first; ++i) proc_active[i] = false;
      }
      L.proc = block_indices(prog, "proc" + tag, proc_active, 0.0, kInfinity);
      L.rho = prog.add_block("rho" + tag, 1, 0.0, 1.0);
      if (kind != SubproblemKind::NomaTrajectory) L.pow = block_indices(prog, "pow" + tag, active[k], 0.0, 1.0);
      if (kind == SubproblemKind::Schedule) {
        L.x = block_indices(prog, "x" + tag, active[k], 0.0, 1.0);
        L.s = block_indices(prog, "s" + tag, active[k], 0.0, kInfinity);
      }
    }
    for (auto* v : {&L.y, &L.up, &L.proc, &L.pow, &L.x, &L.s}) {
      if (v->empty()) v->assign(S, -1);
    }
  }
  if (kind == SubproblemKind::NomaPower) {
    // every UAV's power enters every other UAV's rate, bits or not
    for (int k = 0; k < K; ++k) {
      if (lay[k].pow[0] < 0) {
        std::vector<bool> all(S, true);
        lay[k].pow = block_indices(prog, "pow" + std::to_string(k + 1), all, 0.0, 1.0);
      }
    }
  }

  // Position and velocity expressions.
  for (int k = 0; k < K; ++k) {
    UavLayout& L = lay[k];
    const auto& tr = at.traj.uavs[k];
    L.pos.resize(N + 2);
    L.vel.resize(N + 2);
    if (!traj_var) {
      for (int n = 0; n <= N + 1; ++n) {
        L.pos[n] = constant_vec(tr.pos[n]);
        L.vel[n] = constant_vec(tr.vel[n]);
      }
      continue;
    }
    const UavSpec& u = cfg.uavs[k];
    for (int n = 0; n <= N + 1; ++n) {
      AffineVec2 q{AffineExpr(u.init_pos.x() + n * delta * u.init_vel.x()),
                   AffineExpr(u.init_pos.y() + n * delta * u.init_vel.y())};
      AffineVec2 v{AffineExpr(u.init_vel.x()), AffineExpr(u.init_vel.y())};
      for (int i = 0; i < n; ++i) {
        const double cq = delta * delta * (n - i - 0.5);
        q.x += AffineExpr::variable(L.acc + 2 * i, cq);
        q.y += AffineExpr::variable(L.acc + 2 * i + 1, cq);
        v.x += AffineExpr::variable(L.acc + 2 * i, delta);
        v.y += AffineExpr::variable(L.acc + 2 * i + 1, delta);
      }
      L.pos[n] = std::move(q);
      L.vel[n] = std::move(v);
    }
  }

  // Channel gains at the expansion point (sigma^2-normalized).
  std::vector<std::vector<double>> gain(static_cast<std::size_t>(K), std::vector<double>(S));
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < S; ++i) gain[k][i] = 1.0 / inv_snr(at.traj.uavs[k].pos[i + 1], w, cfg.altitude, cfg.ref_snr);
  }

  // Initial point.
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(prog.num_variables());
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    const auto& tr = at.traj.uavs[k];
    const auto& off = at.offload.uavs[k];
    if (traj_var) {
      for (int i = 0; i <= N; ++i) {
        z0[L.acc + 2 * i] = tr.acc[i].x();
        z0[L.acc + 2 * i + 1] = tr.acc[i].y();
      }
      for (int n = 1; n <= N; ++n) z0[L.tau + n - 1] = std::max(tr.vel[n].norm(), kHoverFloor);
    }
    if (L.rho >= 0) z0[L.rho] = off.partition;
    for (int i = 0; i < S; ++i) {
      if (L.y[i] >= 0) z0[L.y[i]] = (tr.pos[i + 1] - w).squaredNorm() / kDistSqScale;
      if (L.up[i] >= 0) z0[L.up[i]] = off.uplink_bits[i] / kBitScale;
      if (L.proc[i] >= 0) z0[L.proc[i]] = off.processed_bits[i] / kBitScale;
      if (L.pow[i] >= 0) z0[L.pow[i]] = std::clamp(off.power[i] / P, 0.0, 1.0);
      if (L.x[i] >= 0) z0[L.x[i]] = off.schedule[i];
      if (L.s[i] >= 0) z0[L.s[i]] = std::log2(1.0 + off.power[i] * gain[k][i]);
    }
  }
  prog.set_initial_point(z0);

  // Objective, in kJ.
  const double Es = kEnergyScale;
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    if (traj_var) {
      for (int n = 1; n <= N; ++n) {
        prog.add_objective(Atom::norm_cube(L.vel[n].x, L.vel[n].y, cfg.prop_c1 * delta / Es));
        prog.add_objective(Atom::quad_over_linear(
            {AffineExpr::variable(L.acc + 2 * n), AffineExpr::variable(L.acc + 2 * n + 1)},
            AffineExpr::variable(L.tau + n - 1), cfg.gravity, cfg.prop_c2 * delta / Es));
      }
    }
    if (L.rho >= 0) {
      const double lk = cfg.uavs[k].task_bits;
      prog.add_objective(
          Atom::positive_cube(AffineExpr::variable(L.rho), cfg.comp_coeff * lk * lk * lk / (cfg.horizon * cfg.horizon) / Es));
    }
    for (int i = 0; i < S; ++i) {
      if (L.pow[i] < 0) continue;
      switch (kind) {
        case SubproblemKind::Joint:
        case SubproblemKind::FixedTrajectory:
          prog.add_objective(Atom::affine(AffineExpr::variable(L.pow[i], P * slot_duration(k, i) / Es)));
          break;
        case SubproblemKind::NomaPower:
          prog.add_objective(Atom::affine(AffineExpr::variable(L.pow[i], P * delta / Es)));
          break;
        case SubproblemKind::Schedule: {
          const auto& off = at.offload.uavs[k];
          for (auto& a : comm_energy_ub(AffineExpr::variable(L.x[i]), AffineExpr::variable(L.pow[i]),
                                        off.schedule[i], std::clamp(off.power[i] / P, 0.0, 1.0), P * delta / Es)) {
            prog.add_objective(std::move(a));
          }
          break;
        }
        default: break;
      }
    }
  }

  // Mobility.
  if (traj_var) {
    const double v2 = cfg.max_speed * cfg.max_speed;
    const double a2 = cfg.max_accel * cfg.max_accel;
    for (int k = 0; k < K; ++k) {
      const UavLayout& L = lay[k];
      const auto& tr = at.traj.uavs[k];
      const std::string tag = std::to_string(k + 1);
      for (int n = 1; n <= N; ++n) {
        prog.add_constraint("speed" + tag, {Atom::sum_squares({L.vel[n].x, L.vel[n].y}, 1.0 / v2), Atom::affine(AffineExpr(-1.0))});
        prog.add_constraint("tau" + tag, {Atom::sum_squares({AffineExpr::variable(L.tau + n - 1)}, 1.0 / v2),
                                          Atom::affine(speed_sq_lb(L.vel[n], tr.vel[n]) * (-1.0 / v2))});
      }
      for (int i = 0; i <= N; ++i) {
        prog.add_constraint("accel" + tag, {Atom::sum_squares({AffineExpr::variable(L.acc + 2 * i),
                                                               AffineExpr::variable(L.acc + 2 * i + 1)},
                                                              1.0 / a2),
                                            Atom::affine(AffineExpr(-1.0))});
      }
      const UavSpec& u = cfg.uavs[k];
      prog.add_equality("final_pos_x" + tag, (L.pos[N + 1].x - u.final_pos.x()) * 1e-2);
      prog.add_equality("final_pos_y" + tag, (L.pos[N + 1].y - u.final_pos.y()) * 1e-2);
      prog.add_equality("final_vel_x" + tag, L.vel[N + 1].x - u.final_vel.x());
      prog.add_equality("final_vel_y" + tag, L.vel[N + 1].y - u.final_vel.y());
    }
  }

  // Rates.
  const double B = slot_bandwidth();
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    const auto& tr = at.traj.uavs[k];
    const auto& off = at.offload.uavs[k];
    const std::string tag = std::to_string(k + 1);
    for (int i = 0; i < S; ++i) {
      if (L.up[i] < 0) continue;
      const int n = i + 1;
      std::vector<Atom> row;
      switch (kind) {
        case SubproblemKind::Joint:
        case SubproblemKind::FixedTrajectory: {
          // L / (B tau) <= rate, with One-by-One rows multiplied through by x.
          const bool obo = access == Scheme::OneByOne;
          const double x = obo ? off.schedule[i] : 1.0;
          const double tau = obo ? delta : slot_duration(k, i);
          row.push_back(Atom::affine(AffineExpr::variable(L.up[i], kBitScale / (B * tau))));
          std::vector<Atom> rate;
          if (kind == SubproblemKind::Joint) {
            prog.add_constraint("dist" + tag, {Atom::sum_squares({L.pos[n].x - w.x(), L.pos[n].y - w.y()}, 1.0 / kDistSqScale),
                                               Atom::affine(AffineExpr::variable(L.y[i], -1.0))});
            rate = neg_rate_lb_orthogonal(AffineExpr::variable(L.pow[i], P), AffineExpr::variable(L.y[i], kDistSqScale),
                                          (tr.pos[n] - w).squaredNorm(), cfg.ref_snr, cfg.altitude);
          } else {
            rate.push_back(Atom::neg_log(AffineExpr(1.0) + AffineExpr::variable(L.pow[i], P * gain[k][i]), kLog2e));
          }
          for (auto& a : scaled(std::move(rate), x)) row.push_back(std::move(a));
          break;
        }
        case SubproblemKind::Schedule: {
          const AffineExpr xv = AffineExpr::variable(L.x[i]);
          const AffineExpr sv = AffineExpr::variable(L.s[i]);
          prog.add_constraint("slack_rate" + tag,
                              {Atom::affine(sv),
                               Atom::neg_log(AffineExpr(1.0) + AffineExpr::variable(L.pow[i], P * gain[k][i]), kLog2e)});
          const double s_l = std::log2(1.0 + off.power[i] * gain[k][i]);
          row.push_back(Atom::affine(AffineExpr::variable(L.up[i], kBitScale / (B * delta))));
          row.push_back(Atom::sum_squares({xv, sv}, 0.5));
          row.push_back(Atom::affine(prod_sum_lb(xv, sv, off.schedule[i], s_l) * -0.5));
          break;
        }
        case SubproblemKind::NomaTrajectory: {
          row.push_back(Atom::affine(AffineExpr::variable(L.up[i], kBitScale / (B * delta))));
          std::vector<AffineVec2> q;
          std::vector<double> p;
          std::vector<Vec2> ql;
          std::vector<AffineExpr> iargs;
          std::vector<double> icoef;
          for (int j = 0; j < K; ++j) {
            q.push_back(lay[j].pos[n]);
            p.push_back(at.offload.uavs[j].power[i]);
            ql.push_back(at.traj.uavs[j].pos[n]);
            if (j != k && p.back() > 0.0) {
              iargs.push_back(dist_sq_lb(lay[j].pos[n], ql.back(), w) + H2);
              icoef.push_back(p.back() * cfg.ref_snr);
            }
          }
          for (auto& a : neg_noma_sumrate_lb(q, p, ql, w, cfg.ref_snr, cfg.altitude)) row.push_back(std::move(a));
          if (!iargs.empty()) row.push_back(Atom::log_inverse_sum(std::move(iargs), std::move(icoef), kLog2e));
          break;
        }
        case SubproblemKind::NomaPower: {
          row.push_back(Atom::affine(AffineExpr::variable(L.up[i], kBitScale / (B * delta))));
          AffineExpr total(1.0);
          std::vector<AffineExpr> pw;
          std::vector<double> pl, g;
          for (int j = 0; j < K; ++j) {
            total += AffineExpr::variable(lay[j].pow[i], P * gain[j][i]);
            pw.push_back(AffineExpr::variable(lay[j].pow[i], P));
            pl.push_back(at.offload.uavs[j].power[i]);
            g.push_back(gain[j][i]);
          }
          row.push_back(Atom::neg_log(std::move(total), kLog2e));
          row.push_back(Atom::affine(interference_log_ub(pw, pl, g, k)));
          break;
        }
        case SubproblemKind::FlyOnly: break;
      }
      prog.add_constraint("rate" + tag, std::move(row));
    }
  }

  // Bit bookkeeping.
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    if (L.rho < 0) continue;
    const std::string tag = std::to_string(k + 1);
    const double lk = cfg.uavs[k].task_bits / kBitScale;
    AffineExpr sum_up = AffineExpr::variable(L.rho, lk) - lk;
    AffineExpr sum_proc = sum_up;
    for (int i = 0; i < S; ++i) {
      if (L.up[i] >= 0) sum_up += AffineExpr::variable(L.up[i]);
      if (L.proc[i] >= 0) sum_proc += AffineExpr::variable(L.proc[i]);
    }
    prog.add_equality("uplink_total" + tag, sum_up);
    prog.add_equality("processed_total" + tag, sum_proc);
    if (flags.relax_causality) continue;
    AffineExpr cum;
    bool any_proc = false;
    for (int i = 0; i < S - 1; ++i) {
      if (L.up[i] >= 0) cum -= AffineExpr::variable(L.up[i]);
      if (L.proc[i] >= 0) {
        cum += AffineExpr::variable(L.proc[i]);
        any_proc = true;
      }
      if (any_proc) prog.add_constraint("causality" + tag, {Atom::affine(cum)});
    }
  }
  if (!flags.relax_budget) {
    std::vector<Atom> row;
    const double wgt = cfg.comp_coeff * std::pow(kBitScale, 3) / (delta * delta) / cfg.tbs_budget;
    for (int i = 0; i < S; ++i) {
      AffineExpr sum;
      for (int k = 0; k < K; ++k) {
        if (lay[k].proc[i] >= 0) sum += AffineExpr::variable(lay[k].proc[i]);
      }
      if (!sum.is_constant()) row.push_back(Atom::positive_cube(std::move(sum), wgt));
    }
    if (!row.empty()) {
      row.push_back(Atom::affine(AffineExpr(-1.0)));
      prog.add_constraint("budget", std::move(row));
    }
  }
  if (kind == SubproblemKind::Schedule) {
    for (int i = 0; i < S; ++i) {
      AffineExpr sum(-1.0);
      bool any = false;
      for (int k = 0; k < K; ++k) {
        if (lay[k].x[i] >= 0) {
          sum += AffineExpr::variable(lay[k].x[i]);
          any = true;
        }
      }
      if (any) prog.add_constraint("schedule", {Atom::affine(std::move(sum))});
    }
  }
  prog.validate();
}

Iterate Subproblem::Impl::decode(const Eigen::VectorXd& z) const {
  const int K = cfg.num_uavs;
  const int S = N - 1;
  Iterate out = at;
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    const UavSpec& u = cfg.uavs[k];
    if (traj_var) {
      std::vector<Vec2> a(static_cast<std::size_t>(N + 1));
      for (int i = 0; i <= N; ++i) a[i] = Vec2(z[L.acc + 2 * i], z[L.acc + 2 * i + 1]);
      out.traj.uavs[k] = integrate_kinematics(u.init_pos, u.init_vel, a, cfg.slot);
    }
    if (kind == SubproblemKind::FlyOnly) continue;
    UavOffload& off = out.offload.uavs[k];
    off.partition = L.rho >= 0 ? z[L.rho] : 1.0;
    for (int i = 0; i < S; ++i) {
      off.uplink_bits[i] = L.up[i] >= 0 ? z[L.up[i]] * kBitScale : 0.0;
      off.processed_bits[i] = L.proc[i] >= 0 ? z[L.proc[i]] * kBitScale : 0.0;
      if (L.x[i] >= 0) off.schedule[i] = z[L.x[i]];
    }
  }
  // Powers.
  for (int k = 0; k < K; ++k) {
    const UavLayout& L = lay[k];
    UavOffload& off = out.offload.uavs[k];
    for (int i = 0; i < S; ++i) {
      switch (kind) {
        case SubproblemKind::NomaPower:
          off.power[i] = L.pow[i] >= 0 ? z[L.pow[i]] * cfg.max_power : 0.0;
          break;
        case SubproblemKind::NomaTrajectory:
          if (L.up[i] < 0) off.power[i] = at.offload.uavs[k].power[i];
          break;
        case SubproblemKind::FlyOnly:
          break;
        default: {
          const double bits = off.uplink_bits[i];
          double duration = cfg.slot;
          double bw = cfg.bandwidth;
          if (access == Scheme::Tdma) duration = cfg.slot / K;
          if (access == Scheme::Ofdma) bw = cfg.bandwidth / K;
          if (access == Scheme::OneByOne) duration = off.schedule[i] * cfg.slot;
          if (bits <= 0.0 || duration <= 0.0) {
            off.power[i] = 0.0;
            break;
          }
          const double inv = inv_snr(out.traj.uavs[k].pos[i + 1], cfg.tbs_position, cfg.altitude, cfg.ref_snr);
          off.power[i] = required_power(bits, bw, duration, inv);
        }
      }
    }
  }
  return out;
}

Subproblem::Subproblem(const ScenarioConfig& cfg, SubproblemKind kind, Scheme access, const Iterate& at,
                       const BuildFlags& flags)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  impl_->kind = kind;
  impl_->access = access;
  impl_->flags = flags;
  impl_->at = at;
  impl_->build();
}

Subproblem::~Subproblem() = default;
Subproblem::Subproblem(Subproblem&&) noexcept = default;
Subproblem& Subproblem::operator=(Subproblem&&) noexcept = default;

const ConvexProgram& Subproblem::program() const { return impl_->prog; }
SubproblemKind Subproblem::kind() const { return impl_->kind; }
Iterate Subproblem::decode(const Eigen::VectorXd& z) const { return impl_->decode(z); }

Iterate initial_iterate(const ScenarioConfig& cfg) {
  Iterate it;
  it.traj = straight_line_init(cfg);
  it.offload = all_local_offload(cfg, 1.0 / cfg.num_uavs);
  return it;
}

}  // namespace uavmec
