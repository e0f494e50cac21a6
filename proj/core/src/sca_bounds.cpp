#include "uavmec/sca_bounds.hpp"

#include <cmath>
#include <numbers>

namespace uavmec {

namespace {
constexpr double kLog2e = std::numbers::log2e;
}

AffineExpr speed_sq_lb(const AffineVec2& v, const Vec2& v_l) {
  // 2 v_l.v - |v_l|^2
  return v.x * (2.0 * v_l.x()) + v.y * (2.0 * v_l.y()) - v_l.squaredNorm();
}

std::vector<Atom> neg_rate_lb_orthogonal(const AffineExpr& p, const AffineExpr& y, double y_l, double gamma0,
                                         double altitude) {
  if (y_l < 0.0) throw std::invalid_argument("expansion point y_l must be non-negative");
  const double h2 = altitude * altitude;
  const double base = y_l + h2;
  std::vector<Atom> atoms;
  atoms.push_back(Atom::neg_log(y + h2 + p * gamma0, kLog2e));
  atoms.push_back(Atom::affine(AffineExpr(std::log2(base)) + (y - y_l) * (kLog2e / base)));
  return atoms;
}

AffineExpr sumsq_lb(const AffineExpr& x, const AffineExpr& p, double x_l, double p_l) {
  return x * (2.0 * x_l) + p * (2.0 * p_l) - (x_l * x_l + p_l * p_l);
}

std::vector<Atom> comm_energy_ub(const AffineExpr& x, const AffineExpr& p, double x_l, double p_l, double delta) {
  std::vector<Atom> atoms;
  atoms.push_back(Atom::sum_squares({x + p}, 0.5 * delta));
  atoms.push_back(Atom::affine(sumsq_lb(x, p, x_l, p_l) * (-0.5 * delta)));
  return atoms;
}

AffineExpr prod_sum_lb(const AffineExpr& x, const AffineExpr& s, double x_l, double s_l) {
  const double c = x_l + s_l;
  return (x + s) * (2.0 * c) - c * c;
}

std::vector<Atom> neg_noma_sumrate_lb(std::span<const AffineVec2> q, std::span<const double> power,
                                      std::span<const Vec2> q_l, const Vec2& w, double gamma0, double altitude) {
  const double h2 = altitude * altitude;
  const std::size_t k = q.size();
  double total = 1.0;
  std::vector<double> denom(k);
  for (std::size_t j = 0; j < k; ++j) {
    denom[j] = (q_l[j] - w).squaredNorm() + h2;
    total += power[j] * gamma0 / denom[j];
  }
  // Rbar(D) is convex and decreasing in each D_j = |q_j - w|^2, so its tangent
  // in D is a lower bound; -Rbar_lb = -Rbar(D_l) + sum_j U_j (D_j - D_lj).
  std::vector<Atom> atoms;
  AffineExpr constant(-std::log2(total));
  for (std::size_t j = 0; j < k; ++j) {
    const double u = kLog2e * power[j] * gamma0 / (denom[j] * denom[j] * total);
    if (u == 0.0) continue;
    atoms.push_back(Atom::sum_squares({q[j].x - w.x(), q[j].y - w.y()}, u));
    constant -= u * (denom[j] - h2);
  }
  atoms.push_back(Atom::affine(constant));
  return atoms;
}

AffineExpr dist_sq_lb(const AffineVec2& q, const Vec2& q_l, const Vec2& w) {
  const Vec2 d = q_l - w;
  // |d|^2 + 2 d.(q - q_l)
  return q.x * (2.0 * d.x()) + q.y * (2.0 * d.y()) + (d.squaredNorm() - 2.0 * d.dot(q_l));
}

AffineExpr interference_log_ub(std::span<const AffineExpr> power, std::span<const double> power_l,
                               std::span<const double> gain, int k) {
  double interference = 1.0;
  for (std::size_t j = 0; j < power.size(); ++j) {
    if (static_cast<int>(j) != k) interference += power_l[j] * gain[j];
  }
  AffineExpr out(std::log2(interference));
  for (std::size_t j = 0; j < power.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    const double c = kLog2e * gain[j] / interference;
    out += (power[j] - power_l[j]) * c;
  }
  return out;
}

double orthogonal_rate(double p, double y, double gamma0, double altitude) {
  return std::log2(1.0 + p * gamma0 / (y + altitude * altitude));
}

double noma_sumrate(std::span<const Vec2> q, std::span<const double> power, const Vec2& w, double gamma0,
                    double altitude) {
  double total = 1.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    total += power[j] * gamma0 / ((q[j] - w).squaredNorm() + altitude * altitude);
  }
  return std::log2(total);
}

double interference_log(std::span<const double> power, std::span<const double> gain, int k) {
  double interference = 1.0;
  for (std::size_t j = 0; j < power.size(); ++j) {
    if (static_cast<int>(j) != k) interference += power[j] * gain[j];
  }
  return std::log2(interference);
}

}  // namespace uavmec
