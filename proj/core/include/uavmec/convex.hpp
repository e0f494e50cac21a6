#pragma once

#include "uavmec/affine.hpp"

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

/// Smooth convex building blocks. Every atom is a function of a few affine
/// arguments u_j = e_j(z):
///
///   Affine          w * u0
///   SumSquares      w * sum_j u_j^2
///   NormCube        w * (u0^2 + u1^2)^(3/2)
///   QuadOverLinear  w * (1 + sum_{j<m-1} u_j^2 / param^2) / u_{m-1},  u_{m-1} > 0
///   PositiveCube    w * max(u0, 0)^3
///   NegLog          -w * ln(u0),  u0 > 0
///   LogInverseSum   w * ln(1 + sum_j c_j / u_j),  u_j > 0, c_j >= 0
///
/// Weights are non-negative for every kind but Affine, which keeps the sum
/// convex.
enum class AtomKind { Affine, SumSquares, NormCube, QuadOverLinear, PositiveCube, NegLog, LogInverseSum };

std::string atom_kind_name(AtomKind kind);

struct Atom {
  AtomKind kind = AtomKind::Affine;
  double weight = 1.0;
  std::vector<AffineExpr> args;
  double param = 0.0;
  std::vector<double> coeffs;

  static Atom affine(AffineExpr e);
  static Atom sum_squares(std::vector<AffineExpr> args, double weight = 1.0);
  static Atom norm_cube(AffineExpr ux, AffineExpr uy, double weight);
  static Atom quad_over_linear(std::vector<AffineExpr> numer, AffineExpr denom, double scale, double weight);
  static Atom positive_cube(AffineExpr u, double weight);
  static Atom neg_log(AffineExpr u, double weight);
  static Atom log_inverse_sum(std::vector<AffineExpr> args, std::vector<double> coeffs, double weight);
};

/// Value, gradient and Hessian with respect to the atom's own arguments.
struct LocalDerivatives {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Returns false when `u` lies outside the atom's domain.
bool atom_local_eval(const Atom& atom, const Eigen::VectorXd& u, int order, LocalDerivatives& out);

/// Value at z; +inf outside the domain.
double atom_value(const Atom& atom, const Eigen::VectorXd& z);

/// Full-space gradient at z (dense, length z.size()).
Eigen::VectorXd atom_gradient(const Atom& atom, const Eigen::VectorXd& z);

double atoms_value(std::span<const Atom> atoms, const Eigen::VectorXd& z);

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VariableBlock {
  std::string name;
  int offset = 0;
  int size = 0;
};

struct InequalityConstraint {
  std::string name;
  std::vector<Atom> atoms;  // sum(atoms) <= 0
};

struct EqualityConstraint {
  std::string name;
  AffineExpr expr;  // expr == 0
};

/// minimize sum(objective) s.t. each inequality <= 0, each equality == 0,
/// lower <= z <= upper.
class ConvexProgram {
 public:
  int add_block(const std::string& name, int size, double lower = -std::numeric_limits<double>::infinity(),
                double upper = std::numeric_limits<double>::infinity());
  void add_objective(Atom atom);
  void add_constraint(std::string name, std::vector<Atom> atoms);
  void add_equality(std::string name, AffineExpr expr);
  void set_initial_point(Eigen::VectorXd z) { initial_ = std::move(z); }

  int num_variables() const { return static_cast<int>(lower_.size()); }
  const std::vector<VariableBlock>& blocks() const { return blocks_; }
  const VariableBlock& block(const std::string& name) const;
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Atom>& objective() const { return objective_; }
  const std::vector<InequalityConstraint>& constraints() const { return constraints_; }
  const std::vector<EqualityConstraint>& equalities() const { return equalities_; }
  const std::optional<Eigen::VectorXd>& initial_point() const { return initial_; }

  double objective_value(const Eigen::VectorXd& z) const;

  /// Throws ProgramError on out-of-range indices or non-convex weights.
  void validate() const;

  /// Human-readable listing of blocks, bounds, atoms and constraints.
  std::string dump() const;

 private:
  std::vector<VariableBlock> blocks_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Atom> objective_;
  std::vector<InequalityConstraint> constraints_;
  std::vector<EqualityConstraint> equalities_;
  std::optional<Eigen::VectorXd> initial_;
};

/// Worst relative gap between analytic atom gradients and central finite
/// differences, over every atom of the program. Step h = 1e-6 * max(1, |z_i|).
double check_derivatives(const ConvexProgram& program, const Eigen::VectorXd& point);

// ---------------------------------------------------------------------------
// Log-barrier interior-point solver

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string status_name(SolveStatus s);

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 600;  // total Newton steps, phase-I included
  double t0 = 1.0;
  double mu = 10.0;
  double armijo_alpha = 0.01;
  double armijo_beta = 0.5;
  double regularization = 1e-9;
  double center_tol = 1e-9;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> stage_objectives;
  double stationarity = std::numeric_limits<double>::infinity();
  double primal_infeasibility = std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();
  int newton_iterations = 0;
  int phase_one_iterations = 0;
  double wall_seconds = 0.0;
  std::string message;
};

struct SolveResult {
  Eigen::VectorXd z;
  double objective = std::numeric_limits<double>::quiet_NaN();
  bool strictly_feasible = false;  // z came out of the main barrier phase
  SolveReport report;
};

/// Starts from the program's initial point (projected onto the equality
/// constraints); runs phase-I when that point is not strictly feasible.
SolveResult solve_convex(const ConvexProgram& program, const SolverOptions& options = {});

/// Phase-I alone: a point satisfying every inequality and bound strictly, or
/// nullopt when none was found.
std::optional<Eigen::VectorXd> find_strictly_feasible(const ConvexProgram& program, const SolverOptions& options,
                                                      SolveReport* report = nullptr);

}  // namespace uavmec
