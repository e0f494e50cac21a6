#include "uavmec/convex.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace uavmec {

int ConvexProgram::add_block(const std::string& name, int size, double lower, double upper) {
  if (size < 0) throw ProgramError("block '" + name + "' has negative size");
  if (!(lower < upper)) throw ProgramError("block '" + name + "' has an empty box");
  for (const auto& b : blocks_) {
    if (b.name == name) throw ProgramError("duplicate block '" + name + "'");
  }
  const int offset = num_variables();
  blocks_.push_back({name, offset, size});
  lower_.insert(lower_.end(), static_cast<std::size_t>(size), lower);
  upper_.insert(upper_.end(), static_cast<std::size_t>(size), upper);
  return offset;
}

const VariableBlock& ConvexProgram::block(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw ProgramError("no block named '" + name + "'");
}

void ConvexProgram::add_objective(Atom atom) { objective_.push_back(std::move(atom)); }

void ConvexProgram::add_constraint(std::string name, std::vector<Atom> atoms) {
  constraints_.push_back({std::move(name), std::move(atoms)});
}

void ConvexProgram::add_equality(std::string name, AffineExpr expr) {
  expr.canonicalize();
  equalities_.push_back({std::move(name), std::move(expr)});
}

double ConvexProgram::objective_value(const Eigen::VectorXd& z) const { return atoms_value(objective_, z); }

namespace {

void check_atom(const Atom& a, int n, const std::string& where) {
  if (a.args.empty()) throw ProgramError(where + ": atom without arguments");
  if (a.kind != AtomKind::Affine && a.weight < 0.0) throw ProgramError(where + ": negative weight on convex atom");
  switch (a.kind) {
    case AtomKind::Affine:
    case AtomKind::PositiveCube:
    case AtomKind::NegLog:
      if (a.args.size() != 1) throw ProgramError(where + ": scalar atom with several arguments");
      break;
    case AtomKind::NormCube:
      if (a.args.size() != 2) throw ProgramError(where + ": norm_cube needs two arguments");
      break;
    case AtomKind::QuadOverLinear:
      if (!(a.param > 0.0)) throw ProgramError(where + ": quad_over_linear scale must be positive");
      break;
    case AtomKind::LogInverseSum:
      if (a.coeffs.size() != a.args.size()) throw ProgramError(where + ": coefficient count mismatch");
      for (double c : a.coeffs) {
        if (c < 0.0) throw ProgramError(where + ": negative coefficient");
      }
      break;
    case AtomKind::SumSquares:
      break;
  }
  for (const auto& e : a.args) {
    for (const auto& t : e.terms()) {
      if (t.index < 0 || t.index >= n) throw ProgramError(where + ": undeclared variable index");
    }
  }
}

}  // namespace

void ConvexProgram::validate() const {
  const int n = num_variables();
  for (const auto& a : objective_) check_atom(a, n, "objective");
  for (const auto& c : constraints_) {
    for (const auto& a : c.atoms) check_atom(a, n, "constraint '" + c.name + "'");
  }
  for (const auto& e : equalities_) {
    for (const auto& t : e.expr.terms()) {
      if (t.index < 0 || t.index >= n) throw ProgramError("equality '" + e.name + "': undeclared variable index");
    }
  }
  if (initial_ && initial_->size() != n) throw ProgramError("initial point has the wrong length");
}

namespace {

void write_expr(std::ostream& os, const AffineExpr& e) {
  os << e.constant();
  for (const auto& t : e.terms()) os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << "*z" << t.index;
}

void write_atom(std::ostream& os, const Atom& a) {
  os << "  " << atom_kind_name(a.kind) << " w=" << a.weight;
  if (a.kind == AtomKind::QuadOverLinear) os << " scale=" << a.param;
  if (!a.coeffs.empty()) {
    os << " c=[";
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) os << (j ? "," : "") << a.coeffs[j];
    os << "]";
  }
  os << "\n";
  for (const auto& e : a.args) {
    os << "    ";
    write_expr(os, e);
    os << "\n";
  }
}

}  // namespace

std::string ConvexProgram::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "variables " << num_variables() << "\n";
  for (const auto& b : blocks_) {
    os << "block " << b.name << " offset " << b.offset << " size " << b.size;
    if (b.size > 0) os << " box [" << lower_[b.offset] << ", " << upper_[b.offset] << "]";
    os << "\n";
  }
  os << "objective " << objective_.size() << "\n";
  for (const auto& a : objective_) write_atom(os, a);
  os << "inequalities " << constraints_.size() << "\n";
  for (const auto& c : constraints_) {
    os << "le0 " << c.name << "\n";
    for (const auto& a : c.atoms) write_atom(os, a);
  }
  os << "equalities " << equalities_.size() << "\n";
  for (const auto& e : equalities_) {
    os << "eq0 " << e.name << "\n    ";
    write_expr(os, e.expr);
    os << "\n";
  }
  return os.str();
}

double check_derivatives(const ConvexProgram& program, const Eigen::VectorXd& point) {
  if (point.size() != program.num_variables()) throw ProgramError("point has the wrong length");
  std::vector<const Atom*> atoms;
  for (const auto& a : program.objective()) atoms.push_back(&a);
  for (const auto& c : program.constraints()) {
    for (const auto& a : c.atoms) atoms.push_back(&a);
  }

  double worst = 0.0;
  Eigen::VectorXd z = point;
  for (const Atom* a : atoms) {
    if (!std::isfinite(atom_value(*a, point))) throw ProgramError("point outside an atom's domain");
    const Eigen::VectorXd g = atom_gradient(*a, point);
    const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    std::set<int> support;
    for (const auto& e : a->args) {
      for (const auto& t : e.terms()) support.insert(t.index);
    }
    for (int i : support) {
      const double h = 1e-6 * std::max(1.0, std::abs(point[i]));
      z[i] = point[i] + h;
      const double fp = atom_value(*a, z);
      z[i] = point[i] - h;
      const double fm = atom_value(*a, z);
      z[i] = point[i];
      if (!std::isfinite(fp) || !std::isfinite(fm)) throw ProgramError("finite-difference step leaves the domain");
      const double fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / scale);
    }
  }
  return worst;
}

}  // namespace uavmec
