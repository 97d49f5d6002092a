#pragma once

#include <Eigen/Core>
#include <limits>

#include "sandwich/numdiff.hpp"

namespace sandwich::rootfind {

struct SolverConfig {
  enum class Method { newton, broyden };

  Method method = Method::newton;
  double tol = 1e-9;  // max-norm of the residual
  int max_iter = 200;
  numdiff::StepRule step_rule{};
  bool damping = true;  // backtracking line search
};

struct SolveReport {
  Eigen::VectorXd root;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

/// Solver gave up after max_iter; carries the best iterate seen.
class NoConvergence : public Error {
 public:
  explicit NoConvergence(SolveReport report, const std::string& what)
      : Error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Damped Newton iteration with a central-difference Jacobian.
SolveReport newton_solve(const numdiff::VectorFn& f, const Eigen::VectorXd& x0,
                         const SolverConfig& cfg = SolverConfig{});

/// Broyden's good quasi-Newton update; initial Jacobian from finite
/// differences, refreshed when the line search stalls.
SolveReport broyden_solve(const numdiff::VectorFn& f,
                          const Eigen::VectorXd& x0,
                          const SolverConfig& cfg = SolverConfig{});

/// Dispatch on cfg.method.
SolveReport solve(const numdiff::VectorFn& f, const Eigen::VectorXd& x0,
                  const SolverConfig& cfg = SolverConfig{});

/// Signature accepted from user-supplied root finders.
using RootSolver = std::function<Eigen::VectorXd(const numdiff::VectorFn&,
                                                 const Eigen::VectorXd&)>;

}  // namespace sandwich::rootfind
