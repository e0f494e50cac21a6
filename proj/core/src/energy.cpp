#include "uavmec/energy.hpp"

#include <cmath>

namespace uavmec {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Tdma: return "tdma";
    case Scheme::Ofdma: return "ofdma";
    case Scheme::OneByOne: return "one-by-one";
    case Scheme::Noma: return "noma";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "tdma") return Scheme::Tdma;
  if (name == "ofdma") return Scheme::Ofdma;
  if (name == "one-by-one") return Scheme::OneByOne;
  if (name == "noma") return Scheme::Noma;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

double inv_snr(const Vec2& q, const Vec2& w, double altitude, double ref_snr) {
  return ((q - w).squaredNorm() + altitude * altitude) / ref_snr;
}

double required_power(double bits, double bw, double duration, double inv) {
  if (!(bw > 0.0) || !(duration > 0.0)) throw EnergyError("bandwidth and duration must be positive");
  if (bits < 0.0) throw EnergyError("negative bit count");
  const double exponent = bits / (bw * duration);
  if (exponent > kMaxRateExponent) throw EnergyError("rate exponent overflow");
  return std::expm1(exponent * std::log(2.0)) * inv;
}

double comm_energy(double power, double duration) { return power * duration; }

double comp_energy(double bits, double horizon, double coeff) {
  return coeff * bits * bits * bits / (horizon * horizon);
}

double propulsion_slot_energy(const Vec2& v, const Vec2& a, const PropulsionCoeffs& c, double slot) {
  const double speed = v.norm();
  if (speed < kHoverFloor) throw EnergyError("hover singularity");
  const double g2 = c.gravity * c.gravity;
  return (c.c1 * speed * speed * speed + (c.c2 / speed) * (1.0 + a.squaredNorm() / g2)) * slot;
}

double propulsion_energy(std::span<const Vec2> vel, std::span<const Vec2> acc, const PropulsionCoeffs& c,
                         double slot) {
  if (vel.size() != acc.size()) throw EnergyError("velocity and acceleration lengths differ");
  double total = 0.0;
  for (std::size_t n = 0; n < vel.size(); ++n) total += propulsion_slot_energy(vel[n], acc[n], c, slot);
  return total;
}

PropulsionCoeffs propulsion_coeffs(const ScenarioConfig& cfg) {
  return PropulsionCoeffs{cfg.prop_c1, cfg.prop_c2, cfg.gravity};
}

AccessParams access_params(Scheme scheme, const ScenarioConfig& cfg) {
  const double k = static_cast<double>(cfg.num_uavs);
  switch (scheme) {
    case Scheme::Tdma: return {cfg.bandwidth, cfg.slot / k};
    case Scheme::Ofdma: return {cfg.bandwidth / k, cfg.slot};
    case Scheme::OneByOne:
    case Scheme::Noma: return {cfg.bandwidth, cfg.slot};
  }
  return {};
}

EnergyBreakdown total_energy(const ScenarioConfig& cfg, const TrajectoryPlan& traj, const OffloadPlan& offload,
                             Scheme scheme) {
  const int n_slots = cfg.slot_count();
  if (traj.uavs.size() != cfg.uavs.size() || offload.uavs.size() != cfg.uavs.size()) {
    throw EnergyError("plan UAV count does not match scenario");
  }
  const PropulsionCoeffs coeffs = propulsion_coeffs(cfg);
  const AccessParams access = access_params(scheme, cfg);

  EnergyBreakdown out;
  out.per_uav.resize(cfg.uavs.size());
  for (std::size_t k = 0; k < cfg.uavs.size(); ++k) {
    const auto& t = traj.uavs[k];
    const auto& o = offload.uavs[k];
    if (static_cast<int>(t.vel.size()) != n_slots + 2) throw EnergyError("trajectory length mismatch");
    if (static_cast<int>(o.uplink_bits.size()) != n_slots - 1) throw EnergyError("offload length mismatch");

    UavEnergy& e = out.per_uav[k];
    e.fly = propulsion_energy(std::span(t.vel).subspan(1, n_slots), std::span(t.acc).subspan(1, n_slots), coeffs,
                              cfg.slot);
    e.comp = comp_energy(o.partition * cfg.uavs[k].task_bits, cfg.horizon, cfg.comp_coeff);

    for (int i = 0; i < n_slots - 1; ++i) {
      const int n = i + 1;
      const double bits = o.uplink_bits[i];
      switch (scheme) {
        case Scheme::Noma:
          e.comm += comm_energy(o.power[i], cfg.slot);
          break;
        case Scheme::OneByOne: {
          const double x = o.schedule[i];
          if (x <= 0.0) {
            if (bits > 1e-6) throw EnergyError("bits sent on an unscheduled slot");
            break;
          }
          const double inv = inv_snr(t.pos[n], cfg.tbs_position, cfg.altitude, cfg.ref_snr);
          e.comm += comm_energy(required_power(bits, access.bandwidth, x * access.duration, inv), x * access.duration);
          break;
        }
        case Scheme::Tdma:
        case Scheme::Ofdma: {
          if (bits <= 0.0) break;
          const double inv = inv_snr(t.pos[n], cfg.tbs_position, cfg.altitude, cfg.ref_snr);
          e.comm += comm_energy(required_power(bits, access.bandwidth, access.duration, inv),
                                scheme == Scheme::Tdma ? access.duration : cfg.slot);
          break;
        }
      }
    }
    out.fly += e.fly;
    out.comp += e.comp;
    out.comm += e.comm;
  }
  out.total = out.fly + out.comp + out.comm;
  return out;
}

double kinetic_delta_per_kg(const UavSpec& u) {
  return 0.5 * (u.final_vel.squaredNorm() - u.init_vel.squaredNorm());
}

}  // namespace uavmec
