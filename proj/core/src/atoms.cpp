#include "uavmec/convex.hpp"

#include <cmath>

namespace uavmec {

std::string atom_kind_name(AtomKind kind) {
  switch (kind) {
    case AtomKind::Affine: return "affine";
    case AtomKind::SumSquares: return "sum_squares";
    case AtomKind::NormCube: return "norm_cube";
    case AtomKind::QuadOverLinear: return "quad_over_linear";
    case AtomKind::PositiveCube: return "positive_cube";
    case AtomKind::NegLog: return "neg_log";
    case AtomKind::LogInverseSum: return "log_inverse_sum";
  }
  return "unknown";
}

Atom Atom::affine(AffineExpr e) {
  Atom a;
  a.kind = AtomKind::Affine;
  a.args.push_back(std::move(e));
  return a;
}

Atom Atom::sum_squares(std::vector<AffineExpr> args, double weight) {
  Atom a;
  a.kind = AtomKind::SumSquares;
  a.weight = weight;
  a.args = std::move(args);
  return a;
}

Atom Atom::norm_cube(AffineExpr ux, AffineExpr uy, double weight) {
  Atom a;
  a.kind = AtomKind::NormCube;
  a.weight = weight;
  a.args = {std::move(ux), std::move(uy)};
  return a;
}

Atom Atom::quad_over_linear(std::vector<AffineExpr> numer, AffineExpr denom, double scale, double weight) {
  Atom a;
  a.kind = AtomKind::QuadOverLinear;
  a.weight = weight;
  a.param = scale;
  a.args = std::move(numer);
  a.args.push_back(std::move(denom));
  return a;
}

Atom Atom::positive_cube(AffineExpr u, double weight) {
  Atom a;
  a.kind = AtomKind::PositiveCube;
  a.weight = weight;
  a.args.push_back(std::move(u));
  return a;
}

Atom Atom::neg_log(AffineExpr u, double weight) {
  Atom a;
  a.kind = AtomKind::NegLog;
  a.weight = weight;
  a.args.push_back(std::move(u));
  return a;
}

Atom Atom::log_inverse_sum(std::vector<AffineExpr> args, std::vector<double> coeffs, double weight) {
  Atom a;
  a.kind = AtomKind::LogInverseSum;
  a.weight = weight;
  a.args = std::move(args);
  a.coeffs = std::move(coeffs);
  return a;
}

bool atom_local_eval(const Atom& atom, const Eigen::VectorXd& u, int order, LocalDerivatives& out) {
  const Eigen::Index m = u.size();
  const double w = atom.weight;
  if (order >= 1) out.grad.setZero(m);
  if (order >= 2) out.hess.setZero(m, m);

  switch (atom.kind) {
    case AtomKind::Affine:
      out.value = w * u[0];
      if (order >= 1) out.grad[0] = w;
      return true;

    case AtomKind::SumSquares:
      out.value = w * u.squaredNorm();
      if (order >= 1) out.grad = 2.0 * w * u;
      if (order >= 2) out.hess.diagonal().setConstant(2.0 * w);
      return true;

    case AtomKind::NormCube: {
      const double r = u.norm();
      out.value = w * r * r * r;
      if (order >= 1) out.grad = 3.0 * w * r * u;
      if (order >= 2 && r > 0.0) {
        out.hess = (3.0 * w / r) * (u * u.transpose());
        out.hess.diagonal().array() += 3.0 * w * r;
      }
      return true;
    }

    case AtomKind::QuadOverLinear: {
      const double tau = u[m - 1];
      if (!(tau > 0.0)) return false;
      const double g2 = atom.param * atom.param;
      const auto num = u.head(m - 1);
      const double s = 1.0 + num.squaredNorm() / g2;
      out.value = w * s / tau;
      if (order >= 1) {
        out.grad.head(m - 1) = (2.0 * w / (g2 * tau)) * num;
        out.grad[m - 1] = -w * s / (tau * tau);
      }
      if (order >= 2) {
        out.hess.topLeftCorner(m - 1, m - 1).diagonal().setConstant(2.0 * w / (g2 * tau));
        const Eigen::VectorXd cross = (-2.0 * w / (g2 * tau * tau)) * num;
        out.hess.col(m - 1).head(m - 1) = cross;
        out.hess.row(m - 1).head(m - 1) = cross.transpose();
        out.hess(m - 1, m - 1) = 2.0 * w * s / (tau * tau * tau);
      }
      return true;
    }

    case AtomKind::PositiveCube: {
      const double p = std::max(u[0], 0.0);
      out.value = w * p * p * p;
      if (order >= 1) out.grad[0] = 3.0 * w * p * p;
      if (order >= 2) out.hess(0, 0) = 6.0 * w * p;
      return true;
    }

    case AtomKind::NegLog: {
      if (!(u[0] > 0.0)) return false;
      out.value = -w * std::log(u[0]);
      if (order >= 1) out.grad[0] = -w / u[0];
      if (order >= 2) out.hess(0, 0) = w / (u[0] * u[0]);
      return true;
    }

    case AtomKind::LogInverseSum: {
      double d = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!(u[j] > 0.0)) return false;
        d += atom.coeffs[j] / u[j];
      }
      out.value = w * std::log(d);
      if (order >= 1) {
        for (Eigen::Index j = 0; j < m; ++j) out.grad[j] = -w * atom.coeffs[j] / (u[j] * u[j] * d);
      }
      if (order >= 2) {
        Eigen::VectorXd gj(m);
        for (Eigen::Index j = 0; j < m; ++j) gj[j] = atom.coeffs[j] / (u[j] * u[j] * d);
        out.hess = -w * (gj * gj.transpose());
        for (Eigen::Index j = 0; j < m; ++j) out.hess(j, j) += 2.0 * w * atom.coeffs[j] / (u[j] * u[j] * u[j] * d);
      }
      return true;
    }
  }
  return false;
}

namespace {

Eigen::VectorXd eval_args(const Atom& atom, const Eigen::VectorXd& z) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(atom.args.size()));
  for (std::size_t j = 0; j < atom.args.size(); ++j) u[static_cast<Eigen::Index>(j)] = atom.args[j].eval(z);
  return u;
}

}  // namespace

double atom_value(const Atom& atom, const Eigen::VectorXd& z) {
  LocalDerivatives d;
  if (!atom_local_eval(atom, eval_args(atom, z), 0, d)) return std::numeric_limits<double>::infinity();
  return d.value;
}

Eigen::VectorXd atom_gradient(const Atom& atom, const Eigen::VectorXd& z) {
  LocalDerivatives d;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  if (!atom_local_eval(atom, eval_args(atom, z), 1, d)) {
    g.setConstant(std::numeric_limits<double>::quiet_NaN());
    return g;
  }
  for (std::size_t j = 0; j < atom.args.size(); ++j) {
    for (const auto& t : atom.args[j].terms()) g[t.index] += d.grad[static_cast<Eigen::Index>(j)] * t.coef;
  }
  return g;
}

double atoms_value(std::span<const Atom> atoms, const Eigen::VectorXd& z) {
  double v = 0.0;
  for (const auto& a : atoms) v += atom_value(a, z);
  return v;
}

}  // namespace uavmec
