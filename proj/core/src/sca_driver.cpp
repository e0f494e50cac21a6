#include "uavmec/schemes.hpp"

#include <chrono>
#include <cmath>

namespace uavmec {

void SolveOptions::validate() const {
  if (!(sca_tol > 0.0)) throw std::invalid_argument("sca_tol must be positive");
  if (sca_max_iter < 1 || outer_max_iter < 1 || stage_max_iter < 1) {
    throw std::invalid_argument("iteration limits must be positive");
  }
  if (!(inner.tol > 0.0) || inner.max_iter < 1) throw std::invalid_argument("inner tolerances must be positive");
  if (!(rounding_threshold > 0.0 && rounding_threshold < 1.0)) {
    throw std::invalid_argument("rounding threshold must lie in (0, 1)");
  }
}

SolutionBundle sca_drive(const ScenarioConfig& cfg, Scheme scheme, const SubproblemFactory& factory,
                         const Iterate& init, const SolveOptions& opts, int max_iter, bool init_feasible) {
  const auto start = std::chrono::steady_clock::now();
  SolutionBundle out;
  out.access = scheme;
  out.tag = scheme_name(scheme);
  Iterate current = init;
  double energy = std::numeric_limits<double>::infinity();
  if (init_feasible) {
    energy = total_energy(cfg, current.traj, current.offload, scheme).total;
    out.trace.push_back(energy);
  }
  out.status = "iteration-limit";
  const BuildFlags flags = opts.flags();

  for (int it = 0; it < max_iter; ++it) {
    Subproblem sp = factory(current);
    const SolveResult r = solve_convex(sp.program(), opts.inner);
    ++out.subproblems;
    out.newton_iterations += r.report.newton_iterations;
    if (!r.strictly_feasible) {
      if (it == 0) {
        if (r.report.status == SolveStatus::Infeasible) {
          throw InfeasibleError("subproblem infeasible: " + r.report.message);
        }
        if (!init_feasible) throw SchemeError("no progress: " + r.report.message);
      }
      out.status = "stalled";
      out.notes.push_back(subproblem_name(sp.kind()) + ": " + status_name(r.report.status) + " " + r.report.message);
      break;
    }
    Iterate cand = sp.decode(r.z);
    double cand_energy = 0.0;
    try {
      cand_energy = total_energy(cfg, cand.traj, cand.offload, scheme).total;
    } catch (const EnergyError& e) {
      out.status = "stalled";
      out.notes.push_back(std::string("candidate rejected: ") + e.what());
      break;
    }
    const PlanAudit audit = audit_plan(cfg, cand, scheme, flags);
    if (audit.worst() > kFeasibilityTol || !(cand_energy <= energy)) {
      if (!init_feasible && it == 0) throw SchemeError("no progress: first candidate fails the audit");
      out.status = "stalled";
      break;
    }
    const double previous = energy;
    current = std::move(cand);
    energy = cand_energy;
    out.trace.push_back(energy);
    if (std::isfinite(previous) && (previous - energy) <= opts.sca_tol * std::abs(previous)) {
      out.status = "converged";
      break;
    }
  }

  out.traj = current.traj;
  out.offload = current.offload;
  if (!std::isfinite(energy)) throw SchemeError("no progress: no feasible iterate");
  out.energy = total_energy(cfg, out.traj, out.offload, scheme);
  out.audit = audit_plan(cfg, current, scheme, flags);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace uavmec
