#pragma once

#include <Eigen/Core>

#include <vector>

namespace uavmec {

struct LinearTerm {
  int index = 0;
  double coef = 0.0;
};

/// c + sum_i coef_i * z[index_i], with sparse storage.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  static AffineExpr variable(int index, double coef = 1.0);

  double constant() const { return constant_; }
  const std::vector<LinearTerm>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  double eval(const Eigen::VectorXd& z) const;

  /// Sorts by index and merges duplicate indices; drops exact zeros.
  AffineExpr& canonicalize();

  AffineExpr& operator+=(const AffineExpr& rhs);
  AffineExpr& operator-=(const AffineExpr& rhs);
  AffineExpr& operator+=(double c) {
    constant_ += c;
    return *this;
  }
  AffineExpr& operator-=(double c) {
    constant_ -= c;
    return *this;
  }
  AffineExpr& operator*=(double s);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator+(AffineExpr a, double c) { return a += c; }
  friend AffineExpr operator-(AffineExpr a, double c) { return a -= c; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

 private:
  double constant_ = 0.0;
  std::vector<LinearTerm> terms_;
};

/// A pair of affine expressions, used for planar positions and velocities.
struct AffineVec2 {
  AffineExpr x;
  AffineExpr y;

  Eigen::Vector2d eval(const Eigen::VectorXd& z) const { return {x.eval(z), y.eval(z)}; }
};

}  // namespace uavmec
