#include "sandwich/rootfind.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

namespace sandwich::rootfind {

namespace {

constexpr double kMinLambda = 0x1p-10;  // 2^-10 line-search floor

Eigen::VectorXd checked_eval(const numdiff::VectorFn& f,
                             const Eigen::VectorXd& x) {
  Eigen::VectorXd fx = f(x);
  if (!fx.allFinite()) {
    throw NonFiniteEvaluation("residual evaluation returned NaN/inf");
  }
  return fx;
}

// LU solve with an explicit pivot-magnitude gate
Eigen::VectorXd solve_lu(const Eigen::MatrixXd& jac, const Eigen::VectorXd& b,
                         const char* context) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
  const double scale = jac.cwiseAbs().maxCoeff();
  const double floor = 1e-13 * scale;
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(std::abs(diag[i]) > floor)) {
      throw SingularJacobian(std::string(context) +
                             ": pivot below threshold, system looks "
                             "non-identified or collinear");
    }
  }
  return lu.solve(b);
}

// One damped step x + lambda*dx, halving lambda until the residual max-norm
// drops or the floor is hit (the floor step is then taken as-is).
struct StepResult {
  Eigen::VectorXd x;
  Eigen::VectorXd fx;
  double norm;
  bool improved;
};

StepResult damped_step(const numdiff::VectorFn& f, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& dx, double current_norm,
                       bool damping) {
  double lambda = 1.0;
  for (;;) {
    const bool last = !damping || lambda < kMinLambda;
    StepResult r;
    r.x = x + lambda * dx;
    try {
      r.fx = checked_eval(f, r.x);
    } catch (const Error&) {
      // trial point left the residual's domain; retreat if we still can
      if (last) {
        throw;
      }
      lambda *= 0.5;
      continue;
    }
    r.norm = r.fx.lpNorm<Eigen::Infinity>();
    r.improved = r.norm < current_norm;
    if (last || r.improved) {
      return r;
    }
    lambda *= 0.5;
  }
}

SolveReport report_or_throw(SolveReport best, double tol, const char* method) {
  if (best.converged) {
    return best;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%s did not reach tol=%g within the iteration cap (best "
                "residual %g)",
                method, tol, best.residual_norm);
  throw NoConvergence(std::move(best), buf);
}

}  // namespace

SolveReport newton_solve(const numdiff::VectorFn& f, const Eigen::VectorXd& x0,
                         const SolverConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) {
    throw DomainError("SolverConfig requires tol > 0 and max_iter >= 1");
  }

  SolveReport rep;
  rep.root = x0;
  Eigen::VectorXd fx = checked_eval(f, x0);
  rep.residual_norm = fx.lpNorm<Eigen::Infinity>();
  rep.converged = rep.residual_norm <= cfg.tol;

  for (int it = 0; it < cfg.max_iter && !rep.converged; ++it) {
    const Eigen::MatrixXd jac = numdiff::jacobian_central(f, rep.root, cfg.step_rule);
    const Eigen::VectorXd dx = solve_lu(jac, -fx, "newton_solve");
    StepResult st = damped_step(f, rep.root, dx, rep.residual_norm, cfg.damping);
    rep.root = std::move(st.x);
    fx = std::move(st.fx);
    rep.residual_norm = st.norm;
    rep.iterations = it + 1;
    rep.converged = rep.residual_norm <= cfg.tol;
  }
  return report_or_throw(std::move(rep), cfg.tol, "newton_solve");
}

SolveReport broyden_solve(const numdiff::VectorFn& f,
                          const Eigen::VectorXd& x0, const SolverConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) {
    throw DomainError("SolverConfig requires tol > 0 and max_iter >= 1");
  }

  SolveReport rep;
  rep.root = x0;
  Eigen::VectorXd fx = checked_eval(f, x0);
  rep.residual_norm = fx.lpNorm<Eigen::Infinity>();
  rep.converged = rep.residual_norm <= cfg.tol;
  if (rep.converged) {
    return rep;
  }

  Eigen::MatrixXd jac = numdiff::jacobian_central(f, rep.root, cfg.step_rule);
  bool jac_fresh = true;

  for (int it = 0; it < cfg.max_iter && !rep.converged; ++it) {
    const Eigen::VectorXd dx = solve_lu(jac, -fx, "broyden_solve");
    StepResult st = damped_step(f, rep.root, dx, rep.residual_norm, cfg.damping);

    if (!st.improved && !jac_fresh) {
      // stalled on a stale secant model; rebuild from finite differences
      jac = numdiff::jacobian_central(f, rep.root, cfg.step_rule);
      jac_fresh = true;
      rep.iterations = it + 1;
      continue;
    }

    const Eigen::VectorXd step = st.x - rep.root;
    const Eigen::VectorXd df = st.fx - fx;
    const double denom = step.squaredNorm();
    if (denom > 0.0) {
      jac += (df - jac * step) * step.transpose() / denom;  // good update
      jac_fresh = false;
    }

    rep.root = std::move(st.x);
    fx = std::move(st.fx);
    rep.residual_norm = st.norm;
    rep.iterations = it + 1;
    rep.converged = rep.residual_norm <= cfg.tol;
  }
  return report_or_throw(std::move(rep), cfg.tol, "broyden_solve");
}

SolveReport solve(const numdiff::VectorFn& f, const Eigen::VectorXd& x0,
                  const SolverConfig& cfg) {
  return cfg.method == SolverConfig::Method::broyden
             ? broyden_solve(f, x0, cfg)
             : newton_solve(f, x0, cfg);
}

}  // namespace sandwich::rootfind
