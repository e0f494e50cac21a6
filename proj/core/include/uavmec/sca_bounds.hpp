#pragma once

#include "uavmec/convex.hpp"
#include "uavmec/scenario.hpp"

#include <span>
#include <vector>

namespace uavmec {

// First-order bounds used to convexify the non-convex terms. Arguments are
// affine expressions in natural units; expansion points are plain numbers.
// Concave lower bounds R are returned negated, as convex atoms summing to -R,
// so that `required - R <= 0` is written as `required + sum(atoms) <= 0`.

/// |v_l|^2 + 2 v_l.(v - v_l) <= |v|^2.
AffineExpr speed_sq_lb(const AffineVec2& v, const Vec2& v_l);

/// -(log2(y + H^2 + p gamma0) - r_up(y)), where r_up is the tangent of
/// log2(y + H^2) at y_l. The bound is <= log2(1 + p gamma0 / (y + H^2)).
std::vector<Atom> neg_rate_lb_orthogonal(const AffineExpr& p, const AffineExpr& y, double y_l, double gamma0,
                                         double altitude);

/// Tangent of x^2 + p^2 at (x_l, p_l).
AffineExpr sumsq_lb(const AffineExpr& x, const AffineExpr& p, double x_l, double p_l);

/// ((x + p)^2 - sumsq_lb) / 2 * delta >= x p delta.
std::vector<Atom> comm_energy_ub(const AffineExpr& x, const AffineExpr& p, double x_l, double p_l, double delta);

/// Tangent of (x + s)^2 at (x_l, s_l).
AffineExpr prod_sum_lb(const AffineExpr& x, const AffineExpr& s, double x_l, double s_l);

/// -Rbar_lb for log2(1 + sum_j p_j gamma0 / (|q_j - w|^2 + H^2)) with the
/// powers fixed; the bound is tight at q = q_l.
std::vector<Atom> neg_noma_sumrate_lb(std::span<const AffineVec2> q, std::span<const double> power,
                                      std::span<const Vec2> q_l, const Vec2& w, double gamma0, double altitude);

/// |q_l - w|^2 + 2 (q_l - w).(q - q_l) <= |q - w|^2.
AffineExpr dist_sq_lb(const AffineVec2& q, const Vec2& q_l, const Vec2& w);

/// Tangent of log2(1 + sum_{j != k} p_j h_j) at p_l; an over-estimate since
/// the function is concave. `gain[j]` is h_j = gamma0 / (|q_j - w|^2 + H^2).
AffineExpr interference_log_ub(std::span<const AffineExpr> power, std::span<const double> power_l,
                               std::span<const double> gain, int k);

// Plain evaluators of the bounded functions, shared by the audits.
double orthogonal_rate(double p, double y, double gamma0, double altitude);
double noma_sumrate(std::span<const Vec2> q, std::span<const double> power, const Vec2& w, double gamma0,
                    double altitude);
double interference_log(std::span<const double> power, std::span<const double> gain, int k);

}  // namespace uavmec
