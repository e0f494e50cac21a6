#pragma once

#include "uavmec/scenario.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

/// Speeds below this make the propulsion model blow up; evaluating there is
/// an error.
inline constexpr double kHoverFloor = 0.1;

/// Largest admissible L/(B*tau) in `required_power`.
inline constexpr double kMaxRateExponent = 60.0;

enum class Scheme { Tdma, Ofdma, OneByOne, Noma };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

class EnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Noise-to-gain ratio sigma^2 / h = (||q - w||^2 + H^2) / gamma0.
double inv_snr(const Vec2& q, const Vec2& w, double altitude, double ref_snr);

/// Power needed to push `bits` through bandwidth `bw` in `duration` seconds.
double required_power(double bits, double bw, double duration, double inv_snr);

double comm_energy(double power, double duration);

/// Local CPU energy G * bits^3 / T^2.
double comp_energy(double bits, double horizon, double coeff);

struct PropulsionCoeffs {
  double c1 = 0.0;
  double c2 = 0.0;
  double gravity = 9.8;
};

/// One slot of the fixed-wing flight-power model, times the slot length.
double propulsion_slot_energy(const Vec2& v, const Vec2& a, const PropulsionCoeffs& c, double slot);

/// Sum over the given samples (callers pass n = 1..N).
double propulsion_energy(std::span<const Vec2> vel, std::span<const Vec2> acc, const PropulsionCoeffs& c,
                         double slot);

PropulsionCoeffs propulsion_coeffs(const ScenarioConfig& cfg);

/// Effective bandwidth and transmit duration of one UAV in one slot for an
/// orthogonal scheme (One-by-One returns the full slot; scale by x).
struct AccessParams {
  double bandwidth = 0.0;
  double duration = 0.0;
};
AccessParams access_params(Scheme scheme, const ScenarioConfig& cfg);

struct UavEnergy {
  double fly = 0.0;
  double comp = 0.0;
  double comm = 0.0;
  double total() const { return fly + comp + comm; }
};

struct EnergyBreakdown {
  std::vector<UavEnergy> per_uav;
  double fly = 0.0;
  double comp = 0.0;
  double comm = 0.0;
  double total = 0.0;
};

/// True objective of a plan pair. Orthogonal schemes derive the transmit
/// power from the bits (rate met with equality); NOMA charges the stored
/// powers. One-by-One charges x * delta * p on each slot, where p is the
/// power needed to send the slot's bits in x * delta seconds.
EnergyBreakdown total_energy(const ScenarioConfig& cfg, const TrajectoryPlan& traj, const OffloadPlan& offload,
                             Scheme scheme);

/// Change of kinetic energy per kilogram, 0.5 (|v_F|^2 - |v_I|^2); reported,
/// never optimized.
double kinetic_delta_per_kg(const UavSpec& u);

}  // namespace uavmec
