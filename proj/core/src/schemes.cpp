#include "uavmec/schemes.hpp"

#include "uavmec/trajectory.hpp"

#include <chrono>
#include <cmath>

namespace uavmec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SubproblemFactory make_factory(const ScenarioConfig& cfg, SubproblemKind kind, Scheme access, const BuildFlags& flags) {
  return [&cfg, kind, access, flags](const Iterate& it) { return Subproblem(cfg, kind, access, it, flags); };
}

Iterate start_point(const ScenarioConfig& cfg) {
  const auto violations = validate(cfg);
  if (!violations.empty()) throw ScenarioValidationError(violations);
  try {
    return initial_iterate(cfg);
  } catch (const ScenarioError& e) {
    throw InfeasibleError(e.what());
  }
}

// Folds a stage run into the running bundle; the stage trace starts at the
// running bundle's last value.
void absorb(SolutionBundle& acc, const SolutionBundle& stage) {
  if (!stage.trace.empty()) acc.trace.insert(acc.trace.end(), stage.trace.begin() + 1, stage.trace.end());
  acc.subproblems += stage.subproblems;
  acc.newton_iterations += stage.newton_iterations;
  acc.traj = stage.traj;
  acc.offload = stage.offload;
  acc.energy = stage.energy;
  acc.audit = stage.audit;
  acc.notes.insert(acc.notes.end(), stage.notes.begin(), stage.notes.end());
}

SolutionBundle alternate(const ScenarioConfig& cfg, Scheme scheme, SubproblemKind first, SubproblemKind second,
                         const Iterate& init, const SolveOptions& opts) {
  const BuildFlags flags = opts.flags();
  const auto fa = make_factory(cfg, first, scheme, flags);
  const auto fb = make_factory(cfg, second, scheme, flags);
  SolutionBundle acc;
  acc.access = scheme;
  acc.tag = scheme_name(scheme);
  acc.traj = init.traj;
  acc.offload = init.offload;
  acc.energy = total_energy(cfg, init.traj, init.offload, scheme);
  acc.audit = audit_plan(cfg, init, scheme, flags);
  acc.trace.push_back(acc.energy.total);
  acc.status = "iteration-limit";
  for (int outer = 0; outer < opts.outer_max_iter; ++outer) {
    const double before = acc.trace.back();
    absorb(acc, sca_drive(cfg, scheme, fa, acc.iterate(), opts, opts.stage_max_iter));
    absorb(acc, sca_drive(cfg, scheme, fb, acc.iterate(), opts, opts.stage_max_iter));
    ++acc.outer_iterations;
    if (before - acc.trace.back() <= opts.sca_tol * std::abs(before)) {
      acc.status = "converged";
      break;
    }
  }
  return acc;
}

}  // namespace

std::vector<std::vector<double>> round_schedule(const std::vector<std::vector<double>>& x, double theta) {
  std::vector<std::vector<double>> out(x.size());
  if (x.empty()) return out;
  const std::size_t slots = x.front().size();
  for (auto& row : out) row.assign(slots, 0.0);
  for (std::size_t i = 0; i < slots; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < x.size(); ++k) {
      if (x[k][i] > x[best][i]) best = k;
    }
    if (x[best][i] >= theta) out[best][i] = 1.0;
  }
  return out;
}

std::vector<std::vector<double>> round_schedule_balanced(const std::vector<std::vector<double>>& x, double theta) {
  std::vector<std::vector<double>> out(x.size());
  if (x.empty()) return out;
  const std::size_t slots = x.front().size();
  for (auto& row : out) row.assign(slots, 0.0);
  std::vector<double> carry(x.size(), 0.0);
  for (std::size_t i = 0; i < slots; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      carry[k] += x[k][i];
      if (carry[k] > carry[best]) best = k;
    }
    if (carry[best] >= theta) {
      out[best][i] = 1.0;
      carry[best] -= 1.0;
    }
  }
  return out;
}

SolutionBundle solve_tdma(const ScenarioConfig& cfg, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  const Iterate init = start_point(cfg);
  SolutionBundle b = sca_drive(cfg, Scheme::Tdma, make_factory(cfg, SubproblemKind::Joint, Scheme::Tdma, opts.flags()),
                               init, opts, opts.sca_max_iter);
  b.wall_seconds = seconds_since(t0);
  return b;
}

SolutionBundle solve_ofdma(const ScenarioConfig& cfg, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  const Iterate init = start_point(cfg);
  SolutionBundle b = sca_drive(cfg, Scheme::Ofdma,
                               make_factory(cfg, SubproblemKind::Joint, Scheme::Ofdma, opts.flags()), init, opts,
                               opts.sca_max_iter);
  b.wall_seconds = seconds_since(t0);
  return b;
}

SolutionBundle solve_one_by_one(const ScenarioConfig& cfg, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  const Iterate init = start_point(cfg);
  SolutionBundle relaxed =
      alternate(cfg, Scheme::OneByOne, SubproblemKind::Joint, SubproblemKind::Schedule, init, opts);
  relaxed.relaxed_total = relaxed.energy.total;

  std::vector<std::vector<double>> x;
  for (const auto& u : relaxed.offload.uavs) x.push_back(u.schedule);
  const auto binary = round_schedule_balanced(x, opts.rounding_threshold);
  Iterate rounded = relaxed.iterate();
  for (std::size_t k = 0; k < binary.size(); ++k) rounded.offload.uavs[k].schedule = binary[k];

  SolutionBundle out = relaxed;
  try {
    const SolutionBundle repair =
        sca_drive(cfg, Scheme::OneByOne, make_factory(cfg, SubproblemKind::Joint, Scheme::OneByOne, opts.flags()),
                  rounded, opts, opts.sca_max_iter, false);
    out.traj = repair.traj;
    out.offload = repair.offload;
    out.energy = repair.energy;
    out.audit = audit_plan(cfg, repair.iterate(), Scheme::OneByOne, opts.flags(), true);
    out.subproblems += repair.subproblems;
    out.newton_iterations += repair.newton_iterations;
    std::string t = "repair trace:";
    for (double e : repair.trace) t += " " + std::to_string(e);
    out.notes.push_back(t);
  } catch (const std::runtime_error& e) {
    out.status = "rounding-infeasible";
    out.notes.push_back(std::string("rounding repair failed: ") + e.what());
    out.audit = audit_plan(cfg, relaxed.iterate(), Scheme::OneByOne, opts.flags(), true);
  }
  out.wall_seconds = seconds_since(t0);
  return out;
}

SolutionBundle solve_noma(const ScenarioConfig& cfg, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  Iterate init = start_point(cfg);
  for (auto& u : init.offload.uavs) std::fill(u.schedule.begin(), u.schedule.end(), 1.0);
  SolutionBundle b =
      alternate(cfg, Scheme::Noma, SubproblemKind::NomaTrajectory, SubproblemKind::NomaPower, init, opts);
  b.wall_seconds = seconds_since(t0);
  return b;
}

SolutionBundle solve_propulsion_baseline(const ScenarioConfig& cfg, const SolveOptions& opts) {
  opts.validate();
  const auto t0 = Clock::now();
  const Iterate init = start_point(cfg);
  SolutionBundle fly = sca_drive(cfg, Scheme::Tdma,
                                 make_factory(cfg, SubproblemKind::FlyOnly, Scheme::Tdma, opts.flags()), init, opts,
                                 opts.sca_max_iter);
  SolutionBundle out = fly;
  absorb(out, sca_drive(cfg, Scheme::Tdma,
                        make_factory(cfg, SubproblemKind::FixedTrajectory, Scheme::Tdma, opts.flags()),
                        fly.iterate(), opts, 1));
  out.tag = "propulsion-baseline";
  out.wall_seconds = seconds_since(t0);
  return out;
}

SolutionBundle solve_by_name(const std::string& name, const ScenarioConfig& cfg, const SolveOptions& opts) {
  if (name == "propulsion-baseline") return solve_propulsion_baseline(cfg, opts);
  switch (parse_scheme(name)) {
    case Scheme::Tdma: return solve_tdma(cfg, opts);
    case Scheme::Ofdma: return solve_ofdma(cfg, opts);
    case Scheme::OneByOne: return solve_one_by_one(cfg, opts);
    case Scheme::Noma: return solve_noma(cfg, opts);
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

}  // namespace uavmec
