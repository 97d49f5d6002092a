#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "sandwich/rootfind.hpp"

namespace sandwich {

/// A stacked estimating function: theta -> v x n matrix of per-observation
/// contributions psi(Z_i; theta), one row per parameter, one column per unit.
///
/// A standalone function's eval expects exactly arity parameters. Blocks
/// built for stacking may read parameters of earlier blocks; those flip
/// prefix_input on and receive every parameter up through their own slice,
/// with their own parameters in the trailing arity positions.
class EstimatingFunction {
 public:
  using EvalFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  using InitFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  EstimatingFunction(Eigen::Index arity, Eigen::Index n_obs, EvalFn eval);

  Eigen::Index arity() const { return arity_; }
  Eigen::Index n_obs() const { return n_obs_; }
  bool prefix_input() const { return prefix_input_; }

  /// Per-observation contributions, arity x n_obs.
  Eigen::MatrixXd contributions(const Eigen::VectorXd& theta) const;

  /// Row sums: sum_i psi(Z_i; theta), the vector the root finder drives to 0.
  Eigen::VectorXd sum(const Eigen::VectorXd& theta) const;

  /// Suggested starting values for this function's own parameters.
  const Eigen::VectorXd& suggested_init() const { return init_; }

  EstimatingFunction& set_init(Eigen::VectorXd init);
  // start values derived from the stacked prefix's start values
  EstimatingFunction& set_init_from_prefix(InitFn fn);
  EstimatingFunction& set_prefix_input(bool on);

  const InitFn& init_from_prefix() const { return init_fn_; }

 private:
  Eigen::Index arity_;
  Eigen::Index n_obs_;
  EvalFn eval_;
  Eigen::VectorXd init_;
  InitFn init_fn_;
  bool prefix_input_ = false;
};

struct MEstimationResult {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd bread;                // B = (1/n) sum(-psi')
  Eigen::MatrixXd filling;              // F = (1/n) sum(psi psi^T)
  Eigen::MatrixXd asymptotic_variance;  // V = B^-1 F B^-T
  Eigen::MatrixXd covariance;           // V / n, the one CIs use
  rootfind::SolveReport report;
};

/// B at theta: -(1/n) x central-difference Jacobian of the summed psi.
Eigen::MatrixXd compute_bread(const EstimatingFunction& ef,
                              const Eigen::VectorXd& theta,
                              const numdiff::StepRule& rule = {});

/// F at theta: (1/n) M M^T with M = contributions(theta), symmetrized.
Eigen::MatrixXd compute_filling(const EstimatingFunction& ef,
                                const Eigen::VectorXd& theta);

/// (V, V/n). Throws SingularBread when bread fails the pivot threshold.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sandwich_variance(
    const Eigen::MatrixXd& bread, const Eigen::MatrixXd& filling,
    Eigen::Index n_obs);

/// Solve sum_i psi(Z_i; theta) = 0 and assemble the sandwich at the root.
///
/// Propagates NoConvergence (carrying the solver report) and
/// SingularJacobian; DimensionMismatch if init length != arity.
MEstimationResult estimate(const EstimatingFunction& ef,
                           const Eigen::VectorXd& init,
                           const rootfind::SolverConfig& cfg = {});

/// Same, but the root is produced by a caller-supplied solver.
MEstimationResult estimate(const EstimatingFunction& ef,
                           const Eigen::VectorXd& init,
                           const rootfind::SolverConfig& cfg,
                           const rootfind::RootSolver& solver);

/// Wald intervals theta_j +/- z * sqrt(covariance_jj) at the given level.
std::vector<std::pair<double, double>> wald_ci(const MEstimationResult& result,
                                               double level = 0.95);

}  // namespace sandwich
