#include "uavmec/schemes.hpp"

#include "uavmec/sca_bounds.hpp"
#include "uavmec/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace uavmec {

std::vector<std::pair<std::string, double>> PlanAudit::items() const {
  return {{"kinematics", kinematics}, {"boundary", boundary},   {"speed", speed},
          {"accel", accel},           {"causality", causality}, {"totals", totals},
          {"nonnegativity", nonnegativity}, {"budget", budget}, {"power", power},
          {"rate", rate},             {"schedule", schedule},   {"partition", partition}};
}

double PlanAudit::worst() const {
  double w = 0.0;
  for (const auto& [name, v] : items()) w = std::max(w, v);
  return w;
}

PlanAudit audit_plan(const ScenarioConfig& cfg, const Iterate& it, Scheme scheme, const BuildFlags& flags,
                     bool binary_schedule) {
  PlanAudit a;
  const TrajectoryAudit ta = audit_trajectory(cfg, it.traj);
  a.kinematics = ta.kinematics;
  a.boundary = ta.boundary;
  a.speed = std::max(0.0, ta.speed_excess / cfg.max_speed);
  a.accel = std::max(0.0, ta.accel_excess / cfg.max_accel);

  const int K = cfg.num_uavs;
  const int S = cfg.slot_count() - 1;
  const double bs = kBitScale;
  std::vector<double> tbs_load(static_cast<std::size_t>(S), 0.0);
  for (int k = 0; k < K; ++k) {
    const auto& o = it.offload.uavs[k];
    const double lk = cfg.uavs[k].task_bits;
    a.partition = std::max({a.partition, -o.partition, o.partition - 1.0});
    double up = 0.0, proc = 0.0;
    for (int i = 0; i < S; ++i) {
      up += o.uplink_bits[i];
      proc += o.processed_bits[i];
      tbs_load[i] += o.processed_bits[i];
      if (!flags.relax_causality) a.causality = std::max(a.causality, (proc - up) / bs);
      a.nonnegativity = std::max({a.nonnegativity, -o.uplink_bits[i] / bs, -o.processed_bits[i] / bs,
                                  -o.power[i] / cfg.max_power});
      a.power = std::max(a.power, (o.power[i] - cfg.max_power) / cfg.max_power);
    }
    const double expected = (1.0 - o.partition) * lk;
    a.totals = std::max({a.totals, std::abs(up - expected) / bs, std::abs(proc - expected) / bs});
  }
  if (!flags.relax_budget) {
    double e = 0.0;
    for (double l : tbs_load) e += cfg.comp_coeff * l * l * l / (cfg.slot * cfg.slot);
    a.budget = std::max(0.0, (e - cfg.tbs_budget) / std::max(cfg.tbs_budget, 1.0));
  }

  // Rates.
  const AccessParams acc = access_params(scheme, cfg);
  for (int i = 0; i < S; ++i) {
    std::vector<double> p(static_cast<std::size_t>(K)), g(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      p[k] = it.offload.uavs[k].power[i];
      g[k] = 1.0 / inv_snr(it.traj.uavs[k].pos[i + 1], cfg.tbs_position, cfg.altitude, cfg.ref_snr);
    }
    double xsum = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto& o = it.offload.uavs[k];
      const double bits = o.uplink_bits[i];
      double excess = 0.0;
      switch (scheme) {
        case Scheme::Tdma:
        case Scheme::Ofdma:
          excess = bits / (acc.bandwidth * acc.duration) - std::log2(1.0 + p[k] * g[k]);
          break;
        case Scheme::OneByOne: {
          const double x = o.schedule[i];
          xsum += x;
          excess = bits / (cfg.bandwidth * cfg.slot) - std::max(x, 0.0) * std::log2(1.0 + p[k] * g[k]);
          a.schedule = std::max({a.schedule, -x, x - 1.0});
          if (binary_schedule) a.schedule = std::max(a.schedule, std::min(std::abs(x), std::abs(1.0 - x)));
          if (x <= 0.0) a.schedule = std::max(a.schedule, p[k] / cfg.max_power);
          break;
        }
        case Scheme::Noma:
          excess = bits / (cfg.bandwidth * cfg.slot) -
                   std::log2(1.0 + p[k] * g[k] / (std::pow(2.0, interference_log(p, g, k))));
          break;
      }
      a.rate = std::max(a.rate, excess);
    }
    if (scheme == Scheme::OneByOne) a.schedule = std::max(a.schedule, xsum - 1.0);
  }
  return a;
}

}  // namespace uavmec
