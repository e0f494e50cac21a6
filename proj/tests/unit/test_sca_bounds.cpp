#include "fixtures.hpp"

#include "uavmec/oracle.hpp"
#include "uavmec/sca_bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace uavmec;

namespace {

constexpr int kSamples = 10000;
constexpr double kGamma0 = 5000.0;
constexpr double kH = 80.0;

AffineExpr var(int i) { return AffineExpr::variable(i); }
AffineVec2 vec(int i) { return {var(i), var(i + 1)}; }

Eigen::VectorXd point(std::initializer_list<double> v) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) z[i++] = x;
  return z;
}

double neg(const std::vector<Atom>& atoms, const Eigen::VectorXd& z) { return -atoms_value(atoms, z); }

Eigen::VectorXd grad_of(const std::vector<Atom>& atoms, const Eigen::VectorXd& z) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  for (const auto& a : atoms) g += atom_gradient(a, z);
  return g;
}

Eigen::VectorXd grad_of(const AffineExpr& e, int n) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (const auto& t : e.terms()) g[t.index] += t.coef;
  return g;
}

double rel_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

}  // namespace

TEST(SpeedBound, Examples) {
  const Vec2 vl(3, 4);
  EXPECT_DOUBLE_EQ(speed_sq_lb(vec(0), vl).eval(point({3, 4})), 25.0);
  EXPECT_DOUBLE_EQ(speed_sq_lb(vec(0), vl).eval(point({0, 0})), -25.0);
  EXPECT_DOUBLE_EQ(speed_sq_lb(vec(0), Vec2(0, 0)).eval(point({7, -2})), 0.0);
}

TEST(SpeedBound, UnderEstimatesAndMatchesGradient) {
  auto gen = fixture::rng();
  std::uniform_real_distribution<double> u(-40, 40);
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 vl(u(gen), u(gen));
    const Eigen::VectorXd v = point({u(gen), u(gen)});
    EXPECT_LE(speed_sq_lb(vec(0), vl).eval(v), v.squaredNorm() + 1e-9);
  }
  const Vec2 vl(12, -5);
  const auto fd = finite_diff_grad([](const Eigen::VectorXd& z) { return z.squaredNorm(); }, point({12, -5}));
  EXPECT_LE(rel_gap(grad_of(speed_sq_lb(vec(0), vl), 2), fd), 1e-5);
}

TEST(RateBound, Examples) {
  const auto atoms = neg_rate_lb_orthogonal(var(0), var(1), 0.0, kGamma0, kH);
  EXPECT_NEAR(neg(atoms, point({1.28, 0.0})), 1.0, 1e-12);
  EXPECT_NEAR(orthogonal_rate(1.28, 0.0, kGamma0, kH), 1.0, 1e-12);
  const auto at = neg_rate_lb_orthogonal(var(0), var(1), 500.0, kGamma0, kH);
  EXPECT_NEAR(neg(at, point({0.0, 500.0})), 0.0, 1e-12);
  EXPECT_LE(neg(at, point({0.0, 900.0})), 0.0);
  EXPECT_LE(neg(at, point({0.0, 10.0})), 0.0);
  EXPECT_THROW(neg_rate_lb_orthogonal(var(0), var(1), -1.0, kGamma0, kH), std::invalid_argument);
}

TEST(RateBound, UnderEstimatesTrueRate) {
  auto gen = fixture::rng(2);
  std::uniform_real_distribution<double> p(0.0, 1.0), y(0.0, 4e5);
  for (int i = 0; i < kSamples; ++i) {
    const double yl = y(gen);
    const auto atoms = neg_rate_lb_orthogonal(var(0), var(1), yl, kGamma0, kH);
    const double pp = p(gen), yy = y(gen);
    EXPECT_LE(neg(atoms, point({pp, yy})), orthogonal_rate(pp, yy, kGamma0, kH) + 1e-12);
    EXPECT_NEAR(neg(atoms, point({pp, yl})), orthogonal_rate(pp, yl, kGamma0, kH), 1e-9);
  }
}

TEST(RateBound, GradientMatchesTrueRateAtExpansion) {
  const double yl = 2.5e4;
  const Eigen::VectorXd z = point({0.3, yl});
  const auto atoms = neg_rate_lb_orthogonal(var(0), var(1), yl, kGamma0, kH);
  const auto fd = finite_diff_grad(
      [](const Eigen::VectorXd& w) { return orthogonal_rate(w[0], w[1], kGamma0, kH); }, z);
  EXPECT_LE(rel_gap(-grad_of(atoms, z), fd), 1e-5);
}

TEST(SumSquaresBound, Examples) {
  EXPECT_DOUBLE_EQ(sumsq_lb(var(0), var(1), 1, 2).eval(point({1, 2})), 5.0);
  EXPECT_DOUBLE_EQ(sumsq_lb(var(0), var(1), 0, 0).eval(point({3, -1})), 0.0);
  EXPECT_DOUBLE_EQ(sumsq_lb(var(0), var(1), 0.5, 1).eval(point({0, 0})), -1.25);
}

TEST(SumSquaresBound, UnderEstimates) {
  auto gen = fixture::rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < kSamples; ++i) {
    const double xl = u(gen), pl = u(gen);
    const Eigen::VectorXd z = point({u(gen), u(gen)});
    EXPECT_LE(sumsq_lb(var(0), var(1), xl, pl).eval(z), z.squaredNorm() + 1e-12);
  }
}

TEST(CommEnergyBound, Examples) {
  const auto atoms = comm_energy_ub(var(0), var(1), 1.0, 0.5, 1.0);
  EXPECT_NEAR(atoms_value(atoms, point({1.0, 0.5})), 0.5, 1e-12);
  for (double p : {-2.0, 0.0, 0.7, 3.0}) EXPECT_GE(atoms_value(atoms, point({0.0, p})), -1e-12);
}

TEST(CommEnergyBound, OverEstimatesProduct) {
  auto gen = fixture::rng(4);
  std::uniform_real_distribution<double> x(0, 1), p(0, 2), d(0.1, 2);
  for (int i = 0; i < kSamples; ++i) {
    const double xl = x(gen), pl = p(gen), delta = d(gen), xx = x(gen), pp = p(gen);
    const auto atoms = comm_energy_ub(var(0), var(1), xl, pl, delta);
    EXPECT_GE(atoms_value(atoms, point({xx, pp})), xx * pp * delta - 1e-12);
    EXPECT_NEAR(atoms_value(atoms, point({xl, pl})), xl * pl * delta, 1e-12);
  }
  const Eigen::VectorXd z = point({0.4, 1.3});
  const auto fd = finite_diff_grad([](const Eigen::VectorXd& w) { return w[0] * w[1] * 0.5; }, z);
  EXPECT_LE(rel_gap(grad_of(comm_energy_ub(var(0), var(1), 0.4, 1.3, 0.5), z), fd), 1e-5);
}

TEST(ProductSumBound, Examples) {
  EXPECT_DOUBLE_EQ(prod_sum_lb(var(0), var(1), 0.3, 0.9).eval(point({0.3, 0.9})), 1.44);
  EXPECT_DOUBLE_EQ(prod_sum_lb(var(0), var(1), 0, 0).eval(point({4, 2})), 0.0);
  EXPECT_DOUBLE_EQ(prod_sum_lb(var(0), var(1), 1, 1).eval(point({0, 0})), -4.0);
}

TEST(ProductSumBound, UnderEstimates) {
  auto gen = fixture::rng(5);
  std::uniform_real_distribution<double> u(0, 3);
  for (int i = 0; i < kSamples; ++i) {
    const double xl = u(gen), sl = u(gen), xx = u(gen), ss = u(gen);
    EXPECT_LE(prod_sum_lb(var(0), var(1), xl, sl).eval(point({xx, ss})), (xx + ss) * (xx + ss) + 1e-12);
  }
}

TEST(DistanceBound, Examples) {
  const Vec2 w(10, -20);
  EXPECT_DOUBLE_EQ(dist_sq_lb(vec(0), Vec2(13, -16), w).eval(point({13, -16})), 25.0);
  EXPECT_DOUBLE_EQ(dist_sq_lb(vec(0), w, w).eval(point({100, 50})), 0.0);
  EXPECT_DOUBLE_EQ(dist_sq_lb(vec(0), Vec2(13, -16), w).eval(point({10, -20})), -25.0);
}

TEST(DistanceBound, UnderEstimates) {
  auto gen = fixture::rng(6);
  std::uniform_real_distribution<double> u(-500, 500);
  const Vec2 w(0, -100);
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 ql(u(gen), u(gen));
    const Eigen::VectorXd q = point({u(gen), u(gen)});
    EXPECT_LE(dist_sq_lb(vec(0), ql, w).eval(q), (Vec2(q[0], q[1]) - w).squaredNorm() + 1e-6);
  }
}

TEST(NomaSumRateBound, TightAtExpansionSingleUav) {
  const Vec2 w(0, -100);
  const std::vector<AffineVec2> q{vec(0)};
  const std::vector<Vec2> ql{Vec2(50, -40)};
  const std::vector<double> p{0.6};
  const auto atoms = neg_noma_sumrate_lb(q, p, ql, w, kGamma0, kH);
  EXPECT_NEAR(neg(atoms, point({50, -40})), orthogonal_rate(0.6, (ql[0] - w).squaredNorm(), kGamma0, kH), 1e-12);
}

TEST(NomaSumRateBound, UnderEstimatesAndMatchesGradient) {
  auto gen = fixture::rng(7);
  std::uniform_real_distribution<double> pos(-400, 400), pw(0.0, 1.0), step(-60, 60);
  const Vec2 w(0, -100);
  const std::vector<AffineVec2> q{vec(0), vec(2)};
  for (int i = 0; i < kSamples; ++i) {
    const std::vector<Vec2> ql{Vec2(pos(gen), pos(gen)), Vec2(pos(gen), pos(gen))};
    const std::vector<double> p{pw(gen), pw(gen)};
    const auto atoms = neg_noma_sumrate_lb(q, p, ql, w, kGamma0, kH);
    const std::vector<Vec2> qs{ql[0] + Vec2(step(gen), step(gen)), ql[1] + Vec2(step(gen), step(gen))};
    const Eigen::VectorXd z = point({qs[0].x(), qs[0].y(), qs[1].x(), qs[1].y()});
    EXPECT_LE(neg(atoms, z), noma_sumrate(qs, p, w, kGamma0, kH) + 1e-12);
    const Eigen::VectorXd zl = point({ql[0].x(), ql[0].y(), ql[1].x(), ql[1].y()});
    EXPECT_NEAR(neg(atoms, zl), noma_sumrate(ql, p, w, kGamma0, kH), 1e-9);
  }
  const std::vector<Vec2> ql{Vec2(40, -70), Vec2(-120, 30)};
  const std::vector<double> p{0.4, 0.9};
  const Eigen::VectorXd zl = point({40, -70, -120, 30});
  const auto fd = finite_diff_grad(
      [&](const Eigen::VectorXd& z) {
        const std::vector<Vec2> qq{Vec2(z[0], z[1]), Vec2(z[2], z[3])};
        return noma_sumrate(qq, p, w, kGamma0, kH);
      },
      zl);
  EXPECT_LE(rel_gap(-grad_of(neg_noma_sumrate_lb(q, p, ql, w, kGamma0, kH), zl), fd), 1e-5);
}

TEST(InterferenceBound, ExamplesAndDirection) {
  const std::vector<AffineExpr> p1{var(0)};
  const std::vector<double> pl1{0.5}, g1{0.8};
  EXPECT_DOUBLE_EQ(interference_log_ub(p1, pl1, g1, 0).eval(point({0.9})), 0.0);

  auto gen = fixture::rng(8);
  std::uniform_real_distribution<double> pw(0.0, 1.0), gain(0.1, 2.0);
  const std::vector<AffineExpr> p{var(0), var(1), var(2)};
  for (int i = 0; i < kSamples; ++i) {
    const std::vector<double> pl{pw(gen), pw(gen), pw(gen)}, g{gain(gen), gain(gen), gain(gen)};
    const std::vector<double> pp{pw(gen), pw(gen), pw(gen)};
    const int k = i % 3;
    const AffineExpr ub = interference_log_ub(p, pl, g, k);
    EXPECT_GE(ub.eval(point({pp[0], pp[1], pp[2]})), interference_log(pp, g, k) - 1e-12);
    EXPECT_NEAR(ub.eval(point({pl[0], pl[1], pl[2]})), interference_log(pl, g, k), 1e-12);
  }
  const std::vector<double> pl{0.2, 0.7, 0.4}, g{1.5, 0.3, 0.9};
  const auto fd = finite_diff_grad(
      [&](const Eigen::VectorXd& z) {
        const std::vector<double> v{z[0], z[1], z[2]};
        return interference_log(v, g, 1);
      },
      point({0.2, 0.7, 0.4}));
  EXPECT_LE(rel_gap(grad_of(interference_log_ub(p, pl, g, 1), 3), fd), 1e-5);
}
