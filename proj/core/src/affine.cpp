#include "uavmec/affine.hpp"

#include <algorithm>

namespace uavmec {

AffineExpr AffineExpr::variable(int index, double coef) {
  AffineExpr e;
  e.terms_.push_back({index, coef});
  return e;
}

double AffineExpr::eval(const Eigen::VectorXd& z) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * z[t.index];
  return v;
}

AffineExpr& AffineExpr::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), [](const LinearTerm& a, const LinearTerm& b) { return a.index < b.index; });
  std::vector<LinearTerm> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().index == t.index) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const LinearTerm& t) { return t.coef == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& rhs) {
  constant_ += rhs.constant_;
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  return canonicalize();
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& rhs) {
  constant_ -= rhs.constant_;
  for (const auto& t : rhs.terms_) terms_.push_back({t.index, -t.coef});
  return canonicalize();
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  if (s == 0.0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.coef *= s;
  }
  return *this;
}

}  // namespace uavmec
