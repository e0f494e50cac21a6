#include "fixtures.hpp"

#include "uavmec/schemes.hpp"
#include "uavmec/sca_bounds.hpp"
#include "uavmec/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace uavmec;

namespace {

using Grid = std::vector<std::vector<double>>;

// x[k][i] from a per-slot list of UAV fractions
Grid slots(std::initializer_list<std::vector<double>> per_slot) {
  const auto& first = *per_slot.begin();
  Grid x(first.size());
  for (const auto& s : per_slot) {
    for (std::size_t k = 0; k < s.size(); ++k) x[k].push_back(s[k]);
  }
  return x;
}

void expect_monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-6) << "step " << i;
}

const char* const kSchemes[] = {"tdma", "ofdma", "one-by-one", "noma"};

}  // namespace

TEST(RoundSchedule, Examples) {
  EXPECT_EQ(round_schedule(slots({{0.9, 0.05}}), 0.5), slots({{1, 0}}));
  EXPECT_EQ(round_schedule(slots({{0.3, 0.3}}), 0.5), slots({{0, 0}}));
  EXPECT_EQ(round_schedule(slots({{0.5, 0.5}}), 0.5), slots({{1, 0}}));
  EXPECT_EQ(round_schedule(slots({{0.2, 0.7}, {0.6, 0.1}}), 0.5), slots({{0, 1}, {1, 0}}));
}

TEST(RoundSchedule, BalancedSpreadsEvenShares) {
  const Grid even = slots({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(round_schedule_balanced(even, 0.5), slots({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));
  for (const auto& one : {slots({{0.9, 0.05}}), slots({{0.3, 0.3}}), slots({{0.5, 0.5}})}) {
    EXPECT_EQ(round_schedule_balanced(one, 0.5), round_schedule(one, 0.5));
  }
}

TEST(RoundSchedule, AtMostOnePerSlot) {
  auto gen = fixture::rng();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Grid x(3, std::vector<double>(20));
    for (int i = 0; i < 20; ++i) {
      double a = u(gen), b = u(gen), c = u(gen);
      const double s = a + b + c;
      x[0][i] = a / s;
      x[1][i] = b / s;
      x[2][i] = c / s;
    }
    for (const Grid& r : {round_schedule(x, 0.4), round_schedule_balanced(x, 0.4)}) {
      for (int i = 0; i < 20; ++i) {
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
          EXPECT_TRUE(r[k][i] == 0.0 || r[k][i] == 1.0);
          sum += r[k][i];
        }
        EXPECT_LE(sum, 1.0);
      }
    }
  }
}

TEST(Options, Validate) {
  SolveOptions o;
  EXPECT_NO_THROW(o.validate());
  o.rounding_threshold = 1.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = {};
  o.sca_tol = 0.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = {};
  o.sca_max_iter = 0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  EXPECT_THROW(solve_by_name("cdma", fixture::tiny_single()), std::invalid_argument);
}

TEST(Schemes, NoTaskMeansPurePropulsion) {
  ScenarioConfig cfg = fixture::single_uav_short();
  cfg.uavs[0].task_bits = 0.0;
  const SolutionBundle t = solve_tdma(cfg);
  EXPECT_EQ(t.offload.uavs[0].partition, 1.0);
  EXPECT_EQ(t.energy.comm, 0.0);
  EXPECT_EQ(t.energy.comp, 0.0);
  const SolutionBundle base = solve_propulsion_baseline(cfg);
  EXPECT_NEAR(base.energy.total, t.energy.total, 1e-6 * t.energy.total);
}

TEST(Schemes, SingleUavSchemesAgree) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  const SolutionBundle tdma = solve_tdma(cfg);
  const SolutionBundle ofdma = solve_ofdma(cfg);
  EXPECT_NEAR(ofdma.energy.total, tdma.energy.total, 1e-4 * tdma.energy.total);
  const SolutionBundle noma = solve_noma(cfg);
  EXPECT_NEAR(noma.energy.total, ofdma.energy.total, 1e-4 * ofdma.energy.total);
  const SolutionBundle obo = solve_one_by_one(cfg);
  EXPECT_NEAR(obo.energy.total, tdma.energy.total, 1e-4 * tdma.energy.total);
  for (double x : obo.offload.uavs[0].schedule) EXPECT_TRUE(x == 0.0 || x == 1.0);
}

TEST(Schemes, BundlesFeasibleAndMonotone) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  for (const char* name : kSchemes) {
    const SolutionBundle b = solve_by_name(name, cfg);
    EXPECT_LE(b.audit.worst(), kFeasibilityTol) << name;
    expect_monotone(b.trace);
    EXPECT_NEAR(b.trace.back(), b.energy.total, 1e-9 * b.energy.total) << name;
    EXPECT_LE(audit_trajectory(cfg, b.traj).worst(), 1e-6) << name;
  }
}

TEST(Schemes, SingleSubproblemCap) {
  SolveOptions o;
  o.sca_max_iter = 1;
  const SolutionBundle b = solve_tdma(fixture::single_uav_short(), o);
  EXPECT_EQ(b.subproblems, 1);
  EXPECT_LE(b.audit.worst(), kFeasibilityTol);
}

TEST(Schemes, OrthogonalRateIsTight) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  const SolutionBundle b = solve_tdma(cfg);
  const auto& o = b.offload.uavs[0];
  const AccessParams ap = access_params(Scheme::Tdma, cfg);
  int used = 0;
  for (std::size_t i = 0; i < o.uplink_bits.size(); ++i) {
    if (o.uplink_bits[i] <= 1.0) continue;
    ++used;
    const double y = (b.traj.uavs[0].pos[i + 1] - cfg.tbs_position).squaredNorm();
    const double need = o.uplink_bits[i] / (ap.bandwidth * ap.duration);
    const double have = orthogonal_rate(o.power[i], y, cfg.ref_snr, cfg.altitude);
    EXPECT_NEAR(have, need, 1e-4 * need) << "slot " << i + 1;
  }
  EXPECT_GT(used, 0);
}

TEST(Schemes, RelaxationOnlyHelps) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  SolveOptions relaxed;
  relaxed.relax_budget = relaxed.relax_causality = true;
  for (const char* name : kSchemes) {
    EXPECT_LE(solve_by_name(name, cfg, relaxed).energy.total, solve_by_name(name, cfg).energy.total * (1 + 1e-6))
        << name;
  }
}

TEST(Schemes, NarrowerBandDoesNotRaiseOffloading) {
  ScenarioConfig cfg = fixture::single_uav_short();
  const double wide = 1.0 - solve_ofdma(cfg).offload.uavs[0].partition;
  cfg.bandwidth *= 0.5;
  const double narrow = 1.0 - solve_ofdma(cfg).offload.uavs[0].partition;
  EXPECT_LE(narrow, wide + 1e-4);
}

TEST(Schemes, DeterministicBundles) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  const SolutionBundle a = solve_noma(cfg);
  const SolutionBundle b = solve_noma(cfg);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.offload.uavs[0].uplink_bits, b.offload.uavs[0].uplink_bits);
}

TEST(Schemes, SubproblemsAreConvexAndSmooth) {
  const ScenarioConfig cfg = fixture::single_uav_short();
  const Iterate it = initial_iterate(cfg);
  for (SubproblemKind kind : {SubproblemKind::Joint, SubproblemKind::FixedTrajectory, SubproblemKind::Schedule,
                              SubproblemKind::NomaTrajectory, SubproblemKind::NomaPower, SubproblemKind::FlyOnly}) {
    const Scheme access = kind == SubproblemKind::Schedule ? Scheme::OneByOne
                          : (kind == SubproblemKind::NomaTrajectory || kind == SubproblemKind::NomaPower)
                              ? Scheme::Noma
                              : Scheme::Tdma;
    const Subproblem sp(cfg, kind, access, it, {});
    EXPECT_NO_THROW(sp.program().validate()) << subproblem_name(kind);
    ASSERT_TRUE(sp.program().initial_point().has_value()) << subproblem_name(kind);
    EXPECT_LE(check_derivatives(sp.program(), *sp.program().initial_point()), 1e-4) << subproblem_name(kind);
  }
}
