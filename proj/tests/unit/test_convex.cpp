#include "fixtures.hpp"

#include "uavmec/convex.hpp"
#include "uavmec/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace uavmec;

namespace {

AffineExpr var(int i, double c = 1.0) { return AffineExpr::variable(i, c); }

// One program holding one atom of every kind over 6 variables; the point
// generator keeps every domain satisfied.
ConvexProgram all_atoms_program(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> c(-2.0, 2.0), w(0.1, 3.0);
  ConvexProgram p;
  p.add_block("z", 6, -10.0, 10.0);
  auto mix = [&](int i, int j) { return var(i, c(gen)) + var(j, c(gen)) + c(gen); };
  p.add_objective(Atom::affine(mix(0, 1)));
  p.add_objective(Atom::sum_squares({mix(0, 2), mix(3, 4)}, w(gen)));
  p.add_objective(Atom::norm_cube(mix(1, 2), mix(4, 5), w(gen)));
  p.add_objective(Atom::quad_over_linear({mix(0, 3), mix(1, 4)}, var(5) + 20.0, 1.7, w(gen)));
  p.add_objective(Atom::positive_cube(mix(2, 3), w(gen)));
  p.add_constraint("log", {Atom::neg_log(var(4, 0.3) + 20.0, w(gen)), Atom::affine(AffineExpr(-100.0))});
  p.add_constraint("lis", {Atom::log_inverse_sum({var(0, 0.5) + 12.0, var(2, -0.4) + 15.0}, {3.0, 0.7}, w(gen)),
                           Atom::affine(AffineExpr(-100.0))});
  return p;
}

}  // namespace

TEST(Atoms, DerivativesMatchFiniteDifferences) {
  auto gen = fixture::rng();
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ConvexProgram p = all_atoms_program(gen);
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = u(gen);
    worst = std::max(worst, check_derivatives(p, z));
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Atoms, AffineDerivativeIsExact) {
  ConvexProgram p;
  p.add_block("z", 3);
  p.add_objective(Atom::affine(var(0, 2.0) + var(2, -7.0) + 1.0));
  EXPECT_LE(check_derivatives(p, Eigen::Vector3d(1.0, -4.0, 0.25)), 1e-9);
}

TEST(Atoms, QuadOverLinearAtHalfSecond) {
  ConvexProgram p;
  p.add_block("z", 3);
  p.add_objective(Atom::quad_over_linear({var(0), var(1)}, var(2), 9.8, 70.698));
  auto gen = fixture::rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) EXPECT_LE(check_derivatives(p, Eigen::Vector3d(u(gen), u(gen), 0.5)), 1e-5);
}

TEST(Atoms, LocalValuesAndDomains) {
  LocalDerivatives d;
  ASSERT_TRUE(atom_local_eval(Atom::norm_cube(var(0), var(1), 2.0), Eigen::Vector2d(3, 4), 2, d));
  EXPECT_DOUBLE_EQ(d.value, 250.0);
  ASSERT_TRUE(atom_local_eval(Atom::quad_over_linear({var(0)}, var(1), 2.0, 1.0), Eigen::Vector2d(2, 4), 1, d));
  EXPECT_DOUBLE_EQ(d.value, 0.5);
  EXPECT_FALSE(atom_local_eval(Atom::quad_over_linear({var(0)}, var(1), 2.0, 1.0), Eigen::Vector2d(2, 0), 0, d));
  EXPECT_FALSE(atom_local_eval(Atom::neg_log(var(0), 1.0), Eigen::VectorXd::Constant(1, -1.0), 0, d));
  ASSERT_TRUE(atom_local_eval(Atom::positive_cube(var(0), 1.0), Eigen::VectorXd::Constant(1, -2.0), 2, d));
  EXPECT_EQ(d.value, 0.0);
  ASSERT_TRUE(atom_local_eval(Atom::log_inverse_sum({var(0), var(1)}, {1.0, 2.0}, 1.0), Eigen::Vector2d(1, 2), 0, d));
  EXPECT_NEAR(d.value, std::log(3.0), 1e-15);
}

TEST(Atoms, LogInverseSumIsMidpointConvex) {
  auto gen = fixture::rng(17);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  const Atom a = Atom::log_inverse_sum({var(0), var(1), var(2)}, {1.0, 5.0, 0.2}, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const Eigen::Vector3d x(u(gen), u(gen), u(gen)), y(u(gen), u(gen), u(gen));
    EXPECT_LE(atom_value(a, 0.5 * (x + y)), 0.5 * (atom_value(a, x) + atom_value(a, y)) + 1e-12);
  }
}

TEST(Program, ValidationRejectsBadInput) {
  ConvexProgram p;
  p.add_block("z", 2);
  EXPECT_THROW(p.add_block("z", 1), ProgramError);
  EXPECT_THROW(p.add_block("w", 1, 1.0, 0.0), ProgramError);
  p.add_objective(Atom::sum_squares({var(5)}));
  EXPECT_THROW(p.validate(), ProgramError);

  ConvexProgram q;
  q.add_block("z", 2);
  q.add_objective(Atom::sum_squares({var(0)}, -1.0));
  EXPECT_THROW(q.validate(), ProgramError);
}

TEST(Program, DumpListsBlocks) {
  ConvexProgram p;
  p.add_block("acc", 2, -1.0, 1.0);
  p.add_objective(Atom::sum_squares({var(0), var(1)}));
  p.add_constraint("c", {Atom::affine(var(0) - 0.5)});
  const std::string d = p.dump();
  EXPECT_NE(d.find("acc"), std::string::npos);
  EXPECT_NE(d.find("le0"), std::string::npos);
}

TEST(Solver, ProjectionOntoHalfspace) {
  ConvexProgram p;
  p.add_block("z", 3);
  p.add_objective(Atom::sum_squares({var(0), var(1), var(2)}));
  p.add_constraint("z1 >= 1", {Atom::affine(AffineExpr(1.0) - var(0))});
  p.set_initial_point(Eigen::Vector3d(2.0, 1.0, -1.0));
  const SolveResult r = solve_convex(p);
  ASSERT_EQ(r.report.status, SolveStatus::Optimal) << r.report.message;
  EXPECT_NEAR(r.z[0], 1.0, 1e-5);
  EXPECT_NEAR(r.z[1], 0.0, 1e-5);
  EXPECT_NEAR(r.objective, 1.0, 1e-5);
}

TEST(Solver, MonotoneInTau) {
  const double c2 = 70.698;
  ConvexProgram p;
  p.add_block("tau", 1, 0.1, 5.0);
  p.add_objective(Atom::quad_over_linear({}, var(0), 1.0, c2));
  p.set_initial_point(Eigen::VectorXd::Constant(1, 1.0));
  const SolveResult r = solve_convex(p);
  ASSERT_EQ(r.report.status, SolveStatus::Optimal) << r.report.message;
  EXPECT_NEAR(r.z[0], 5.0, 1e-4);
  EXPECT_NEAR(r.objective, c2 / 5.0, 1e-5 * c2);
}

TEST(Solver, EqualityConstrainedQuadratic) {
  // min x^2 + 2 y^2 s.t. x + y = 3 -> (2, 1)
  ConvexProgram p;
  p.add_block("z", 2);
  p.add_objective(Atom::sum_squares({var(0)}));
  p.add_objective(Atom::sum_squares({var(1)}, 2.0));
  p.add_equality("sum", var(0) + var(1) - 3.0);
  const SolveResult r = solve_convex(p);
  ASSERT_EQ(r.report.status, SolveStatus::Optimal) << r.report.message;
  EXPECT_NEAR(r.z[0], 2.0, 1e-6);
  EXPECT_NEAR(r.z[1], 1.0, 1e-6);
}

TEST(Solver, PhaseOneFromInfeasibleStart) {
  // disk of radius 1 around (3, 3); start at the origin
  ConvexProgram p;
  p.add_block("z", 2);
  p.add_objective(Atom::affine(var(0) + var(1)));
  p.add_constraint("disk", {Atom::sum_squares({var(0) - 3.0, var(1) - 3.0}), Atom::affine(AffineExpr(-1.0))});
  const SolveResult r = solve_convex(p);
  ASSERT_EQ(r.report.status, SolveStatus::Optimal) << r.report.message;
  EXPECT_GT(r.report.phase_one_iterations, 0);
  EXPECT_NEAR(r.objective, 6.0 - std::sqrt(2.0), 1e-5);
}

TEST(Solver, PhaseOneReturnsStrictlyFeasiblePoint) {
  auto gen = fixture::rng(23);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    ConvexProgram p;
    p.add_block("z", 3, -5.0, 5.0);
    p.add_objective(Atom::affine(var(0)));
    const Eigen::Vector3d c(u(gen), u(gen), u(gen));
    p.add_constraint("ball", {Atom::sum_squares({var(0) - c[0], var(1) - c[1], var(2) - c[2]}),
                              Atom::affine(AffineExpr(-0.5))});
    p.add_constraint("cube", {Atom::positive_cube(var(1) - c[1], 1.0), Atom::affine(AffineExpr(-0.01))});
    SolveReport rep;
    const auto z = find_strictly_feasible(p, {}, &rep);
    ASSERT_TRUE(z.has_value()) << rep.message;
    for (const auto& con : p.constraints()) EXPECT_LT(atoms_value(con.atoms, *z), 0.0);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GT((*z)[i], -5.0);
      EXPECT_LT((*z)[i], 5.0);
    }
  }
}

TEST(Solver, DetectsInfeasibility) {
  ConvexProgram p;
  p.add_block("z", 1);
  p.add_objective(Atom::affine(var(0)));
  p.add_constraint("z <= -1", {Atom::affine(var(0) + 1.0)});
  p.add_constraint("z >= 1", {Atom::affine(AffineExpr(1.0) - var(0))});
  const SolveResult r = solve_convex(p);
  EXPECT_EQ(r.report.status, SolveStatus::Infeasible);
  EXPECT_FALSE(r.strictly_feasible);
}

TEST(Solver, StageObjectivesNonIncreasingAndDeterministic) {
  auto gen = fixture::rng(31);
  ConvexProgram p = all_atoms_program(gen);
  p.set_initial_point(Eigen::VectorXd::Zero(6));
  const SolveResult a = solve_convex(p);
  const SolveResult b = solve_convex(p);
  ASSERT_EQ(a.report.status, SolveStatus::Optimal) << a.report.message;
  const auto& s = a.report.stage_objectives;
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i], s[i - 1] + 1e-8 * (1 + std::abs(s[i - 1])));
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.report.newton_iterations, b.report.newton_iterations);
  EXPECT_EQ(a.report.stage_objectives, b.report.stage_objectives);
}

TEST(Solver, OptimalImpliesResidualsWithinTolerance) {
  auto gen = fixture::rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    ConvexProgram p = all_atoms_program(gen);
    const SolveResult r = solve_convex(p);
    if (r.report.status != SolveStatus::Optimal) continue;
    EXPECT_LE(r.report.stationarity, 1e-6);
    EXPECT_LE(r.report.primal_infeasibility, 1e-6);
    EXPECT_LE(r.report.complementarity, 1e-6);
  }
}

TEST(Solver, AgreesWithGridOnSmoothProblem) {
  // min (x-1)^2 + |(x, y)|^3/10 + 1/(y+3) over a box: compare with a fine grid
  ConvexProgram p;
  p.add_block("z", 2, -2.0, 2.0);
  p.add_objective(Atom::sum_squares({var(0) - 1.0}));
  p.add_objective(Atom::norm_cube(var(0), var(1), 0.1));
  p.add_objective(Atom::quad_over_linear({}, var(1) + 3.0, 1.0, 1.0));
  const SolveResult r = solve_convex(p);
  ASSERT_EQ(r.report.status, SolveStatus::Optimal);
  double best = 1e300;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const Eigen::Vector2d z(-2.0 + i * 0.01, -2.0 + j * 0.01);
      best = std::min(best, p.objective_value(z));
    }
  }
  EXPECT_LE(r.objective, best + 1e-9);
  EXPECT_GE(r.objective, best - 1e-3);
}
