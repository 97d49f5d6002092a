#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "json.hpp"
#include "sandwich/dataset.hpp"
#include "sandwich/equations.hpp"
#include "sandwich/estimator.hpp"
#include "sandwich/model_config.hpp"
#include "sandwich/runner.hpp"

namespace py = pybind11;
using namespace sandwich;

namespace {

// one shape for every fit: point estimates, Wald intervals, the sandwich
// pieces, and the solver report
py::dict fit_result(const EstimatingFunction& ef, double level) {
  const MEstimationResult res = estimate(ef, ef.suggested_init());
  const auto ci = wald_ci(res, level);
  const Eigen::Index p = res.theta_hat.size();
  Eigen::VectorXd se(p), lo(p), hi(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    se[j] = std::sqrt(res.covariance(j, j));
    lo[j] = ci[static_cast<std::size_t>(j)].first;
    hi[j] = ci[static_cast<std::size_t>(j)].second;
  }
  py::dict out;
  out["theta"] = res.theta_hat;
  out["se"] = se;
  out["ci_lower"] = lo;
  out["ci_upper"] = hi;
  out["covariance"] = res.covariance;
  out["asymptotic_variance"] = res.asymptotic_variance;
  out["bread"] = res.bread;
  out["filling"] = res.filling;
  out["converged"] = res.report.converged;
  out["iterations"] = res.report.iterations;
  out["residual_norm"] = res.report.residual_norm;
  out["ci_level"] = level;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "M-estimation: stacked estimating equations solved for the parameters, "
      "with empirical sandwich variances for inference";
  m.attr("__version__") = runner::kToolVersion;

  const auto base = py::register_exception<Error>(m, "EstimationError");
  py::register_exception<config::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<io::DataError>(m, "DataError", base.ptr());

  m.def(
      "mean",
      [](const Eigen::VectorXd& y, double level) {
        return fit_result(equations::ee_mean(y), level);
      },
      py::arg("y"), py::arg("level") = 0.95,
      "Sample mean with its sandwich variance.");

  m.def(
      "robust_location",
      [](const Eigen::VectorXd& y, double k, double level) {
        return fit_result(equations::ee_robust_location(y, k), level);
      },
      py::arg("y"), py::arg("k") = 1.345, py::arg("level") = 0.95,
      "Location from residuals clipped at k (outliers contribute, their "
      "influence capped).");

  m.def(
      "linear",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double level) {
        return fit_result(equations::ee_linear_regression(X, y), level);
      },
      py::arg("X"), py::arg("y"), py::arg("level") = 0.95,
      "Least-squares coefficients with heteroskedasticity-robust "
      "(sandwich) covariance. X is the full design, intercept included.");

  m.def(
      "robust_linear",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double k,
         double level) {
        return fit_result(equations::ee_robust_regression(X, y, k), level);
      },
      py::arg("X"), py::arg("y"), py::arg("k") = 1.345,
      py::arg("level") = 0.95,
      "Regression with residuals clipped at k.");

  m.def(
      "logistic",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double level) {
        return fit_result(equations::ee_logistic_regression(X, y), level);
      },
      py::arg("X"), py::arg("y"), py::arg("level") = 0.95,
      "Logistic regression scores solved directly; y must be 0/1.");

  m.def(
      "loglogistic",
      [](const Eigen::VectorXd& dose, const Eigen::VectorXd& response,
         int n_params, double level) {
        return fit_result(equations::ee_loglogistic(dose, response, n_params),
                          level);
      },
      py::arg("dose"), py::arg("response"), py::arg("n_params") = 3,
      py::arg("level") = 0.95,
      "Three- or four-parameter log-logistic dose-response curve; theta is "
      "(ec50, steepness, upper_limit[, lower_limit]).");

  m.def(
      "dose_response_ec",
      [](const Eigen::VectorXd& dose, const Eigen::VectorXd& response,
         double delta, int n_params, double level) {
        std::vector<EstimatingFunction> blocks;
        blocks.push_back(equations::ee_loglogistic(dose, response, n_params));
        blocks.push_back(equations::ee_effective_concentration(
            delta, 0, n_params, dose.size()));
        return fit_result(equations::stack(std::move(blocks)), level);
      },
      py::arg("dose"), py::arg("response"), py::arg("delta") = 50.0,
      py::arg("n_params") = 3, py::arg("level") = 0.95,
      "Log-logistic curve stacked with the delta% effective concentration, "
      "so the EC estimate (last theta entry) carries the curve's "
      "uncertainty.");

  m.def(
      "inverse_odds_means",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& s,
         const Eigen::MatrixXd& biomarkers, double level) {
        std::vector<EstimatingFunction> blocks;
        blocks.push_back(equations::ee_logistic_regression(X, s));
        blocks.push_back(
            equations::ee_weighted_means(biomarkers, s, X, 0, X.cols()));
        return fit_result(equations::stack(std::move(blocks)), level);
      },
      py::arg("X"), py::arg("s"), py::arg("biomarkers"),
      py::arg("level") = 0.95,
      "Means of log biomarkers over the s=1 rows, standardized to the s=0 "
      "population by inverse odds weights from a logistic model of s on X "
      "(intercept included in X). theta is (coefficients..., means...); the "
      "weight-model uncertainty is propagated into the means' intervals.");

  m.def(
      "fit_config",
      [](const std::string& config_text, const std::string& data_csv) {
        const config::ModelSpec spec = config::parse_config(config_text);
        const io::Dataset data = io::parse_csv(data_csv);
        return runner::run_fit(spec, data,
                               {"fit", config_text, data_csv, {}})
            .dump(2);
      },
      py::arg("config_text"), py::arg("data_csv"),
      "Run a declarative model configuration against CSV text and return "
      "the full JSON result document (identical to the command-line tool).");
}
