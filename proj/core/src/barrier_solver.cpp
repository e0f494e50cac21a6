#include "uavmec/convex.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <functional>

namespace uavmec {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Accumulates the gradient and Hessian of sum(atoms) into dense storage.
class Assembler {
 public:
  explicit Assembler(int n) : mark_(static_cast<std::size_t>(n), -1), scratch_(Eigen::VectorXd::Zero(n)) {}

  // Value of sum(atoms); false outside the domain.
  static bool value(const std::vector<Atom>& atoms, const Eigen::VectorXd& z, double& out) {
    out = 0.0;
    LocalDerivatives d;
    Eigen::VectorXd u;
    for (const auto& a : atoms) {
      u.resize(static_cast<Eigen::Index>(a.args.size()));
      for (std::size_t j = 0; j < a.args.size(); ++j) u[static_cast<Eigen::Index>(j)] = a.args[j].eval(z);
      if (!atom_local_eval(a, u, 0, d) || !std::isfinite(d.value)) return false;
      out += d.value;
    }
    return true;
  }

  // Sparse gradient of sum(atoms) into scratch_/touched_, and scale * Hessian into H.
  void gradient_and_hessian(const std::vector<Atom>& atoms, const Eigen::VectorXd& z, double hess_scale,
                            Eigen::MatrixXd& H) {
    clear();
    LocalDerivatives d;
    Eigen::VectorXd u;
    for (const auto& a : atoms) {
      const auto m = static_cast<Eigen::Index>(a.args.size());
      u.resize(m);
      for (Eigen::Index j = 0; j < m; ++j) u[j] = a.args[static_cast<std::size_t>(j)].eval(z);
      atom_local_eval(a, u, 2, d);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (d.grad[j] == 0.0) continue;
        for (const auto& t : a.args[static_cast<std::size_t>(j)].terms()) touch(t.index) += d.grad[j] * t.coef;
      }
      if (hess_scale == 0.0) continue;
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto& ej = a.args[static_cast<std::size_t>(j)].terms();
        for (Eigen::Index k = 0; k < m; ++k) {
          const double h = hess_scale * d.hess(j, k);
          if (h == 0.0) continue;
          const auto& ek = a.args[static_cast<std::size_t>(k)].terms();
          for (const auto& tj : ej) {
            const double hj = h * tj.coef;
            for (const auto& tk : ek) H(tj.index, tk.index) += hj * tk.coef;
          }
        }
      }
    }
  }

  const std::vector<int>& touched() const { return touched_; }
  double grad(int i) const { return scratch_[i]; }

 private:
  double& touch(int i) {
    if (mark_[static_cast<std::size_t>(i)] < 0) {
      mark_[static_cast<std::size_t>(i)] = 1;
      touched_.push_back(i);
    }
    return scratch_[i];
  }
  void clear() {
    for (int i : touched_) {
      mark_[static_cast<std::size_t>(i)] = -1;
      scratch_[i] = 0.0;
    }
    touched_.clear();
  }

  std::vector<int> mark_;
  Eigen::VectorXd scratch_;
  std::vector<int> touched_;
};

// Newton log-barrier method for one program. The start must be strictly
// feasible and satisfy the equalities.
class BarrierEngine {
 public:
  BarrierEngine(const ConvexProgram& prog, const SolverOptions& opt)
      : prog_(prog), opt_(opt), n_(prog.num_variables()), asm_(n_) {
    const auto& eqs = prog.equalities();
    A_.setZero(static_cast<Eigen::Index>(eqs.size()), n_);
    b_.setZero(static_cast<Eigen::Index>(eqs.size()));
    for (std::size_t r = 0; r < eqs.size(); ++r) {
      for (const auto& t : eqs[r].expr.terms()) A_(static_cast<Eigen::Index>(r), t.index) += t.coef;
      b_[static_cast<Eigen::Index>(r)] = -eqs[r].expr.constant();
    }
    for (int i = 0; i < n_; ++i) {
      if (std::isfinite(prog.lower()[i])) ++m_;
      if (std::isfinite(prog.upper()[i])) ++m_;
    }
    m_ += static_cast<int>(prog.constraints().size());
  }

  int barrier_terms() const { return m_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }

  // phi = t f0 - sum log(-f_i) - sum log(bound slack); false if not strictly feasible.
  bool phi(const Eigen::VectorXd& z, double t, double& out, double* f0_out = nullptr) const {
    double f0 = 0.0;
    if (!Assembler::value(prog_.objective(), z, f0)) return false;
    double bar = 0.0;
    for (const auto& c : prog_.constraints()) {
      double f = 0.0;
      if (!Assembler::value(c.atoms, z, f) || !(f < 0.0)) return false;
      bar -= std::log(-f);
    }
    const auto& lo = prog_.lower();
    const auto& up = prog_.upper();
    for (int i = 0; i < n_; ++i) {
      if (std::isfinite(lo[i])) {
        const double s = z[i] - lo[i];
        if (!(s > 0.0)) return false;
        bar -= std::log(s);
      }
      if (std::isfinite(up[i])) {
        const double s = up[i] - z[i];
        if (!(s > 0.0)) return false;
        bar -= std::log(s);
      }
    }
    out = t * f0 + bar;
    if (f0_out) *f0_out = f0;
    return std::isfinite(out);
  }

  void derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& g, Eigen::MatrixXd& H,
                   Eigen::VectorXd& grad_f0) {
    g.setZero(n_);
    H.setZero(n_, n_);
    grad_f0.setZero(n_);
    asm_.gradient_and_hessian(prog_.objective(), z, t, H);
    for (int i : asm_.touched()) grad_f0[i] = asm_.grad(i);
    g = t * grad_f0;
    for (const auto& c : prog_.constraints()) {
      double f = 0.0;
      Assembler::value(c.atoms, z, f);
      const double d = -f;
      asm_.gradient_and_hessian(c.atoms, z, 1.0 / d, H);
      const auto& idx = asm_.touched();
      const double inv_d2 = 1.0 / (d * d);
      for (int i : idx) {
        const double gi = asm_.grad(i);
        g[i] += gi / d;
        const double gi_s = gi * inv_d2;
        for (int j : idx) H(i, j) += gi_s * asm_.grad(j);
      }
    }
    const auto& lo = prog_.lower();
    const auto& up = prog_.upper();
    for (int i = 0; i < n_; ++i) {
      if (std::isfinite(lo[i])) {
        const double s = z[i] - lo[i];
        g[i] -= 1.0 / s;
        H(i, i) += 1.0 / (s * s);
      }
      if (std::isfinite(up[i])) {
        const double s = up[i] - z[i];
        g[i] += 1.0 / s;
        H(i, i) += 1.0 / (s * s);
      }
    }
  }

  // Equality-constrained Newton direction. False when the KKT system cannot
  // be factorized even after regularization.
  bool newton_step(const Eigen::VectorXd& g, const Eigen::MatrixXd& H, Eigen::VectorXd& dz, Eigen::VectorXd& nu) {
    Eigen::VectorXd D(n_);
    for (int i = 0; i < n_; ++i) {
      const double h = H(i, i);
      D[i] = h > 1e-300 ? 1.0 / std::sqrt(h) : 1.0;
    }
    Eigen::MatrixXd Hs = D.asDiagonal() * H * D.asDiagonal();
    double lambda = opt_.regularization;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
      Eigen::MatrixXd Hr = Hs;
      Hr.diagonal().array() += lambda;
      llt.compute(Hr);
      if (llt.info() == Eigen::Success) break;
      lambda *= 100.0;
      if (lambda > 1.0) return false;
    }
    const Eigen::VectorXd rhs = -(D.asDiagonal() * g);
    Eigen::VectorXd w = llt.solve(rhs);
    if (A_.rows() == 0) {
      dz = D.asDiagonal() * w;
      nu.resize(0);
      return dz.allFinite();
    }
    const Eigen::MatrixXd As = A_ * D.asDiagonal();
    const Eigen::MatrixXd X = llt.solve(As.transpose());
    const Eigen::MatrixXd S = As * X;
    Eigen::LDLT<Eigen::MatrixXd> sldlt(S);
    if (sldlt.info() != Eigen::Success) return false;
    nu = sldlt.solve(As * w);
    w -= X * nu;
    dz = D.asDiagonal() * w;
    return dz.allFinite() && nu.allFinite();
  }

  // Runs the barrier path from z. `early_stop(f0)` ends the run as soon as it
  // returns true for an accepted iterate.
  SolveReport run(Eigen::VectorXd& z, int iter_budget, const std::function<bool(double)>& early_stop = {}) {
    SolveReport rep;
    double t = opt_.t0;
    Eigen::VectorXd g, grad_f0, dz, nu;
    Eigen::MatrixXd H;
    double phi_z = 0.0, f0 = 0.0;
    if (!phi(z, t, phi_z, &f0)) {
      rep.status = SolveStatus::NumericalFailure;
      rep.message = "start point is not strictly feasible";
      return rep;
    }
    const double m = std::max(1, m_);
    bool failed = false;
    for (;;) {
      // centering
      for (;;) {
        if (rep.newton_iterations >= iter_budget) {
          rep.status = SolveStatus::IterationLimit;
          finish(z, t, g, H, dz, grad_f0, f0, rep);
          rep.message = "Newton iteration budget exhausted";
          return rep;
        }
        derivatives(z, t, g, H, grad_f0);
        if (!newton_step(g, H, dz, nu)) {
          failed = true;
          break;
        }
        const double slope = g.dot(dz);
        const double dec2 = -slope;
        if (dec2 / 2.0 <= opt_.center_tol) break;
        double step = 1.0;
        double phi_new = 0.0, f0_new = 0.0;
        const double slack = 1e-14 * (std::abs(phi_z) + 1.0);
        bool accepted = false;
        Eigen::VectorXd trial(n_);
        while (step > 1e-20) {
          trial = z + step * dz;
          if (phi(trial, t, phi_new, &f0_new) && phi_new <= phi_z + opt_.armijo_alpha * step * slope + slack) {
            accepted = true;
            break;
          }
          step *= opt_.armijo_beta;
        }
        ++rep.newton_iterations;
        if (!accepted) break;  // roundoff floor reached; treat as centered
        const bool stalled = (phi_z - phi_new) <= slack && step < 1e-6;
        z = trial;
        phi_z = phi_new;
        f0 = f0_new;
        if (early_stop && early_stop(f0)) {
          rep.stage_objectives.push_back(f0);
          rep.status = SolveStatus::Optimal;
          finish(z, t, g, H, dz, grad_f0, f0, rep);
          return rep;
        }
        if (stalled) break;
      }
      if (failed) break;
      rep.stage_objectives.push_back(f0);
      if (early_stop && early_stop(f0)) break;
      if (m / t <= opt_.tol * (1.0 + std::abs(f0))) break;
      t *= opt_.mu;
      if (!phi(z, t, phi_z, &f0)) {
        failed = true;
        break;
      }
    }
    finish(z, t, g, H, dz, grad_f0, f0, rep);
    if (failed) {
      rep.status = SolveStatus::NumericalFailure;
      rep.message = "Newton system could not be factorized";
    } else if (rep.stationarity <= opt_.tol && rep.primal_infeasibility <= opt_.tol &&
               rep.complementarity <= opt_.tol) {
      rep.status = SolveStatus::Optimal;
    } else {
      rep.status = SolveStatus::NumericalFailure;
      rep.message = "residuals above tolerance at the end of the barrier path";
    }
    return rep;
  }

  double last_t() const { return last_t_; }

 private:
  void finish(const Eigen::VectorXd& z, double t, Eigen::VectorXd& g, Eigen::MatrixXd& H, Eigen::VectorXd& dz,
              Eigen::VectorXd& grad_f0, double f0, SolveReport& rep) {
    last_t_ = t;
    derivatives(z, t, g, H, grad_f0);
    Eigen::VectorXd nu;
    // Half the Newton decrement over t estimates how far f0 sits above the
    // central point; relative to |f0| it is the stationarity residual.
    if (newton_step(g, H, dz, nu)) {
      rep.stationarity = std::max(0.0, -g.dot(dz)) / (2.0 * t) / (1.0 + std::abs(f0));
    }
    double primal = 0.0;
    if (A_.rows() > 0) primal = (A_ * z - b_).lpNorm<Eigen::Infinity>();
    for (const auto& c : prog_.constraints()) {
      double f = 0.0;
      if (!Assembler::value(c.atoms, z, f)) f = kInf;
      primal = std::max(primal, f);
    }
    for (int i = 0; i < n_; ++i) {
      primal = std::max(primal, prog_.lower()[i] - z[i]);
      primal = std::max(primal, z[i] - prog_.upper()[i]);
    }
    rep.primal_infeasibility = std::max(0.0, primal);
    rep.complementarity = std::max(1, m_) / t / (1.0 + std::abs(f0));
  }

  const ConvexProgram& prog_;
  SolverOptions opt_;
  int n_;
  int m_ = 0;
  Assembler asm_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double last_t_ = 0.0;
};

Eigen::VectorXd project_onto_equalities(const ConvexProgram& prog, Eigen::VectorXd z) {
  const auto& eqs = prog.equalities();
  if (eqs.empty()) return z;
  const int n = prog.num_variables();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(eqs.size()), n);
  Eigen::VectorXd r(static_cast<Eigen::Index>(eqs.size()));
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    for (const auto& t : eqs[i].expr.terms()) A(static_cast<Eigen::Index>(i), t.index) += t.coef;
    r[static_cast<Eigen::Index>(i)] = eqs[i].expr.eval(z);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A * A.transpose());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-14 * ldlt.vectorD().maxCoeff()) {
    throw ProgramError("equality constraints are rank deficient");
  }
  z -= A.transpose() * ldlt.solve(r);
  return z;
}

double max_violation(const ConvexProgram& prog, const Eigen::VectorXd& z, bool& in_domain) {
  in_domain = true;
  double worst = -kInf;
  for (const auto& c : prog.constraints()) {
    double f = 0.0;
    if (!Assembler::value(c.atoms, z, f)) {
      in_domain = false;
      return kInf;
    }
    worst = std::max(worst, f);
  }
  for (int i = 0; i < prog.num_variables(); ++i) {
    worst = std::max(worst, prog.lower()[i] - z[i]);
    worst = std::max(worst, z[i] - prog.upper()[i]);
  }
  double f0 = 0.0;
  if (!Assembler::value(prog.objective(), z, f0)) in_domain = false;
  return worst;
}

// minimize s  s.t.  f_i(z) <= s, l - z <= s, z - u <= s, s >= -1, Az = b.
ConvexProgram phase_one_program(const ConvexProgram& prog) {
  ConvexProgram p1;
  const int n = prog.num_variables();
  p1.add_block("z", n);
  const int s = p1.add_block("s", 1);
  const AffineExpr neg_s = AffineExpr::variable(s, -1.0);
  p1.add_objective(Atom::affine(AffineExpr::variable(s)));
  for (const auto& c : prog.constraints()) {
    std::vector<Atom> atoms = c.atoms;
    atoms.push_back(Atom::affine(neg_s));
    p1.add_constraint(c.name, std::move(atoms));
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(prog.lower()[i])) {
      p1.add_constraint("lower", {Atom::affine(AffineExpr(prog.lower()[i]) - AffineExpr::variable(i) + neg_s)});
    }
    if (std::isfinite(prog.upper()[i])) {
      p1.add_constraint("upper", {Atom::affine(AffineExpr::variable(i) - prog.upper()[i] + neg_s)});
    }
  }
  p1.add_constraint("s floor", {Atom::affine(neg_s - 1.0)});
  for (const auto& e : prog.equalities()) p1.add_equality(e.name, e.expr);
  return p1;
}

constexpr double kPhaseOneMargin = 1e-3;

}  // namespace

std::optional<Eigen::VectorXd> find_strictly_feasible(const ConvexProgram& program, const SolverOptions& options,
                                                      SolveReport* report) {
  program.validate();
  const int n = program.num_variables();
  Eigen::VectorXd z0 = program.initial_point().value_or(Eigen::VectorXd::Zero(n));
  z0 = project_onto_equalities(program, z0);
  bool in_domain = true;
  const double viol = max_violation(program, z0, in_domain);
  SolveReport local;
  SolveReport& rep = report ? *report : local;
  if (!in_domain) {
    rep.status = SolveStatus::NumericalFailure;
    rep.message = "initial point outside an atom's domain";
    return std::nullopt;
  }
  if (viol < 0.0) {
    rep.status = SolveStatus::Optimal;
    return z0;
  }

  const ConvexProgram p1 = phase_one_program(program);
  Eigen::VectorXd y(n + 1);
  y.head(n) = z0;
  y[n] = viol + 1.0;
  // Starting phase-I at t = 1 would push s far above zero first; with t = m
  // every constraint starts with a slack of order one.
  SolverOptions p1_opt = options;
  p1_opt.t0 = std::max(options.t0, static_cast<double>(p1.constraints().size()));
  BarrierEngine engine(p1, p1_opt);
  SolveReport r1 = engine.run(y, options.max_iter, [](double s) { return s < -kPhaseOneMargin; });
  rep.phase_one_iterations = r1.newton_iterations;
  rep.newton_iterations = r1.newton_iterations;
  const Eigen::VectorXd z = y.head(n);
  const double reached = max_violation(program, z, in_domain);
  if (in_domain && reached < 0.0) {
    rep.status = SolveStatus::Optimal;
    return z;
  }
  if (r1.status != SolveStatus::IterationLimit && y[n] > options.tol) {
    rep.status = SolveStatus::Infeasible;
    rep.message = "phase-I optimum " + std::to_string(y[n]) + " is positive";
  } else if (r1.status == SolveStatus::Optimal) {
    rep.status = SolveStatus::NumericalFailure;
    rep.message = "feasible set has an empty interior";
  } else {
    rep.status = r1.status;
    rep.message = "phase-I: " + r1.message;
  }
  rep.primal_infeasibility = std::max(0.0, reached);
  return std::nullopt;
}

SolveResult solve_convex(const ConvexProgram& program, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult out;
  SolveReport pre;
  auto z0 = find_strictly_feasible(program, options, &pre);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  if (!z0) {
    out.report = pre;
    out.z = program.initial_point().value_or(Eigen::VectorXd::Zero(program.num_variables()));
    out.report.wall_seconds = elapsed();
    return out;
  }
  Eigen::VectorXd z = *z0;
  BarrierEngine engine(program, options);
  SolveReport rep = engine.run(z, std::max(0, options.max_iter - pre.newton_iterations));
  rep.phase_one_iterations = pre.phase_one_iterations;
  rep.newton_iterations += pre.newton_iterations;
  rep.wall_seconds = elapsed();
  out.z = std::move(z);
  out.strictly_feasible = true;
  out.objective = program.objective_value(out.z);
  out.report = std::move(rep);
  return out;
}

}  // namespace uavmec
