#pragma once

#include "uavmec/scenario.hpp"

#include <random>

namespace uavmec::fixture {

/// The reference instance at delta = 1 s (N = 59), the resolution the
/// end-to-end tests run at.
inline ScenarioConfig reference_delta1() {
  ScenarioConfig cfg = reference_scenario();
  cfg.slot = 1.0;
  return cfg;
}

/// One UAV crossing 120 m in 4 s (N = 3) at cruise speed.
inline ScenarioConfig tiny_single(double bits = 1e4) {
  ScenarioConfig cfg = reference_scenario();
  cfg.num_uavs = 1;
  cfg.horizon = 4.0;
  cfg.slot = 1.0;
  cfg.uavs = {UavSpec{Vec2(-60, -20), Vec2(60, -20), Vec2(30, 0), Vec2(30, 0), bits}};
  return cfg;
}

/// Single UAV, T = 20 s, delta = 1 s, L = 2e5 bits.
inline ScenarioConfig single_uav_short() {
  ScenarioConfig cfg = reference_scenario();
  cfg.num_uavs = 1;
  cfg.horizon = 20.0;
  cfg.slot = 1.0;
  cfg.uavs = {UavSpec{Vec2(-300, -200), Vec2(300, -200), Vec2(30, 0), Vec2(30, 0), 2e5}};
  return cfg;
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240611) { return std::mt19937_64(seed); }

}  // namespace uavmec::fixture
