#include "sandwich/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sandwich/stats.hpp"

namespace sandwich {

EstimatingFunction::EstimatingFunction(Eigen::Index arity, Eigen::Index n_obs,
                                       EvalFn eval)
    : arity_(arity), n_obs_(n_obs), eval_(std::move(eval)) {
  if (arity_ < 1 || n_obs_ < 1) {
    throw DimensionMismatch("EstimatingFunction needs arity >= 1, n_obs >= 1");
  }
  init_ = Eigen::VectorXd::Zero(arity_);
}

Eigen::MatrixXd EstimatingFunction::contributions(
    const Eigen::VectorXd& theta) const {
  if (!prefix_input_ && theta.size() != arity_) {
    throw DimensionMismatch("theta has length " + std::to_string(theta.size()) +
                            ", expected " + std::to_string(arity_));
  }
  Eigen::MatrixXd m = eval_(theta);
  if (m.rows() != arity_ || m.cols() != n_obs_) {
    throw DimensionMismatch("psi evaluation produced a misshapen matrix");
  }
  return m;
}

Eigen::VectorXd EstimatingFunction::sum(const Eigen::VectorXd& theta) const {
  return contributions(theta).rowwise().sum();
}

EstimatingFunction& EstimatingFunction::set_init(Eigen::VectorXd init) {
  if (init.size() != arity_) {
    throw DimensionMismatch("init length must equal arity");
  }
  init_ = std::move(init);
  return *this;
}

EstimatingFunction& EstimatingFunction::set_init_from_prefix(InitFn fn) {
  init_fn_ = std::move(fn);
  return *this;
}

EstimatingFunction& EstimatingFunction::set_prefix_input(bool on) {
  prefix_input_ = on;
  return *this;
}

Eigen::MatrixXd compute_bread(const EstimatingFunction& ef,
                              const Eigen::VectorXd& theta,
                              const numdiff::StepRule& rule) {
  const auto summed = [&ef](const Eigen::VectorXd& t) { return ef.sum(t); };
  const double n = static_cast<double>(ef.n_obs());
  return -numdiff::jacobian_central(summed, theta, rule) / n;
}

Eigen::MatrixXd compute_filling(const EstimatingFunction& ef,
                                const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd m = ef.contributions(theta);
  Eigen::MatrixXd f = m * m.transpose() / static_cast<double>(ef.n_obs());
  f = ((f + f.transpose()) * 0.5).eval();
  return f;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sandwich_variance(
    const Eigen::MatrixXd& bread, const Eigen::MatrixXd& filling,
    Eigen::Index n_obs) {
  if (bread.rows() != bread.cols() || filling.rows() != filling.cols() ||
      bread.rows() != filling.rows()) {
    throw DimensionMismatch("bread and filling must be square and conformant");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(bread);
  const double scale = bread.cwiseAbs().maxCoeff();
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(std::abs(diag[i]) > 1e-13 * scale)) {
      throw SingularBread("bread is numerically singular");
    }
  }
  const Eigen::MatrixXd bread_inv =
      lu.solve(Eigen::MatrixXd::Identity(bread.rows(), bread.cols()));
  Eigen::MatrixXd v = bread_inv * filling * bread_inv.transpose();
  v = ((v + v.transpose()) * 0.5).eval();
  return {v, v / static_cast<double>(n_obs)};
}

namespace {

MEstimationResult assemble(const EstimatingFunction& ef,
                           rootfind::SolveReport report,
                           const numdiff::StepRule& rule) {
  MEstimationResult res;
  res.theta_hat = report.root;
  // recomputed at theta-hat with the default step, independent of solver path
  res.bread = compute_bread(ef, res.theta_hat, rule);
  res.filling = compute_filling(ef, res.theta_hat);
  std::tie(res.asymptotic_variance, res.covariance) =
      sandwich_variance(res.bread, res.filling, ef.n_obs());
  res.report = std::move(report);
  return res;
}

}  // namespace

MEstimationResult estimate(const EstimatingFunction& ef,
                           const Eigen::VectorXd& init,
                           const rootfind::SolverConfig& cfg) {
  if (init.size() != ef.arity()) {
    throw DimensionMismatch("init length " + std::to_string(init.size()) +
                            " does not match arity " +
                            std::to_string(ef.arity()));
  }
  if (ef.n_obs() < 2) {
    throw DimensionMismatch("estimation needs at least 2 observations");
  }
  const auto summed = [&ef](const Eigen::VectorXd& t) { return ef.sum(t); };
  rootfind::SolveReport report = rootfind::solve(summed, init, cfg);
  return assemble(ef, std::move(report), cfg.step_rule);
}

MEstimationResult estimate(const EstimatingFunction& ef,
                           const Eigen::VectorXd& init,
                           const rootfind::SolverConfig& cfg,
                           const rootfind::RootSolver& solver) {
  if (init.size() != ef.arity()) {
    throw DimensionMismatch("init length does not match arity");
  }
  const auto summed = [&ef](const Eigen::VectorXd& t) { return ef.sum(t); };
  rootfind::SolveReport report;
  report.root = solver(summed, init);
  if (report.root.size() != ef.arity()) {
    throw DimensionMismatch("user solver returned a root of wrong length");
  }
  report.residual_norm = ef.sum(report.root).lpNorm<Eigen::Infinity>();
  report.converged = report.residual_norm <= cfg.tol;
  report.iterations = -1;  // unknown, external solver
  return assemble(ef, std::move(report), cfg.step_rule);
}

std::vector<std::pair<double, double>> wald_ci(const MEstimationResult& result,
                                               double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("confidence level must lie in (0, 1)");
  }
  const double z = stats::normal_quantile(1.0 - (1.0 - level) / 2.0);
  std::vector<std::pair<double, double>> out;
  out.reserve(result.theta_hat.size());
  for (Eigen::Index j = 0; j < result.theta_hat.size(); ++j) {
    const double var = result.covariance(j, j);
    if (!(var >= 0.0) || !std::isfinite(var)) {
      throw DomainError("covariance diagonal must be finite and nonnegative");
    }
    const double half = z * std::sqrt(var);
    out.emplace_back(result.theta_hat[j] - half, result.theta_hat[j] + half);
  }
  return out;
}

}  // namespace sandwich
