#include "sandwich/replicate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sandwich/dataset.hpp"
#include "sandwich/equations.hpp"
#include "sandwich/estimator.hpp"
#include "sandwich/model_config.hpp"
#include "sandwich/rng.hpp"
#include "sandwich/runner.hpp"
#include "sandwich/ryegrass.hpp"
#include "sandwich/stats.hpp"

namespace sandwich::replicate {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& bytes,
                std::ostream& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << bytes;
  log << "wrote " << path.string() << "\n";
}

ordered_json fit_document(const std::string& example,
                          const std::string& config_text,
                          const io::Dataset& data,
                          std::optional<std::uint64_t> seed) {
  const config::ModelSpec spec = config::parse_config(config_text);
  return runner::run_fit(
      spec, data, {"replicate " + example, config_text, io::write_csv(data), seed});
}

// config.txt, points.csv, results.json, summary.txt — common to all examples
void write_fit_files(const fs::path& dir, const std::string& config_text,
                     const io::Dataset& data, const ordered_json& doc,
                     std::ostream& log) {
  write_file(dir / "config.txt", config_text, log);
  write_file(dir / "points.csv", io::write_csv(data), log);
  write_file(dir / "results.json", doc.dump(2) + "\n", log);
  write_file(dir / "summary.txt", runner::format_summary(doc), log);
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (const double v : values) {
    if (!row.empty()) {
      row += ',';
    }
    row += io::format_number(v);
  }
  return row + "\n";
}

// Fifteen points around a known straight line (noise scale 0.5, small
// enough that only the planted point gets clipped), then one response
// pushed up by 3 at the smallest x. The fit of record is the
// clipped-residual regression on the contaminated sample; lines.csv adds
// the two least-squares companions (clean-sample reference, contaminated)
// for the plot.
void robust_line(std::uint64_t seed, const fs::path& dir, std::ostream& log) {
  Rng rng(seed);
  const int n = 15;
  Eigen::VectorXd x(n), y_clean(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i + 1.0;
    y_clean[i] = 1.0 + 0.5 * x[i] + 0.5 * rng.normal();
  }
  Eigen::Index at;
  x.minCoeff(&at);
  Eigen::VectorXd y = y_clean;
  y[at] += 3.0;

  Eigen::MatrixXd values(n, 3);
  values.col(0) = x;
  values.col(1) = y;
  values.col(2).setZero();
  values(at, 2) = 1.0;
  const io::Dataset data({"x", "y", "outlier"}, values);

  const std::string config_text =
      "family = robust_linear\n"
      "data.outcome = y\n"
      "data.regressors = x\n"
      "options.k = 1.345\n";
  const ordered_json doc = fit_document("robust-line", config_text, data, seed);
  write_fit_files(dir, config_text, data, doc, log);

  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = x;
  const auto ols_ref = equations::ee_linear_regression(X, y_clean);
  const Eigen::VectorXd ref =
      estimate(ols_ref, ols_ref.suggested_init()).theta_hat;
  const auto ols_con = equations::ee_linear_regression(X, y);
  const Eigen::VectorXd con =
      estimate(ols_con, ols_con.suggested_init()).theta_hat;

  std::string lines = "label,intercept,slope\n";
  lines += "reference," + csv_row({ref[0], ref[1]});
  lines += "least_squares," + csv_row({con[0], con[1]});
  lines += "robust," + csv_row({doc.at("estimates").at(0).at("value"),
                                doc.at("estimates").at(1).at("value")});
  write_file(dir / "lines.csv", lines, log);
}

// Bundled ryegrass measurements; the 20% effective concentration is solved
// in the same system as the curve parameters so its interval reflects their
// uncertainty. curve.csv samples the fitted curve for plotting.
void dose_response(const fs::path& dir, std::ostream& log) {
  const Eigen::MatrixXd& ry = data::ryegrass();
  const io::Dataset data({"conc", "rootl"}, ry);

  const std::string config_text =
      "family = stack\n"
      "stack.1.family = loglogistic3\n"
      "stack.1.data.dose = conc\n"
      "stack.1.data.response = rootl\n"
      "stack.2.family = effective_concentration\n"
      "stack.2.options.delta = 20\n";
  const ordered_json doc = fit_document("dose-response", config_text, data, {});
  write_fit_files(dir, config_text, data, doc, log);

  Eigen::Vector3d gamma;
  for (int j = 0; j < 3; ++j) {
    gamma[j] = doc.at("estimates").at(j).at("value").get<double>();
  }
  std::string curve = "dose,fitted\n";
  curve += csv_row({0.0, equations::loglogistic_mean(0.0, gamma)});
  const double lo = std::log(0.094), hi = std::log(30.0);
  for (int j = 0; j < 200; ++j) {
    const double dose = std::exp(lo + j * (hi - lo) / 199.0);
    curve += csv_row({dose, equations::loglogistic_mean(dose, gamma)});
  }
  write_file(dir / "curve.csv", curve, log);
}

// A small convenience sample (57 subjects, 70% recent drug use) next to a
// larger target-population sample (500 subjects, 8%). Three positive
// biomarkers are simulated log-normal with a drug-use shift, so the naive
// convenience-sample means overstate the target population's. The fit of
// record stacks the drug-use logistic model with the inverse-odds-weighted
// means; means.csv adds the naive means and a fixed-weight refit whose
// intervals ignore the weight-model uncertainty.
void standardize(std::uint64_t seed, const fs::path& dir, std::ostream& log) {
  Rng rng(seed);
  const int n1 = 57, n1_drug = 40;
  const int n0 = 500, n0_drug = 40;
  const int n = n1 + n0;
  const std::vector<std::string> markers{"sIL2R", "IL12", "IL10"};
  const double base[] = {6.5, 3.2, 1.8};
  const double shift[] = {0.6, 0.5, 0.3};
  const double sd[] = {0.8, 0.7, 0.9};

  Eigen::MatrixXd values(n, 5);
  for (int i = 0; i < n; ++i) {
    const bool in_sample = i < n1;
    const bool drug = in_sample ? i < n1_drug : i - n1 < n0_drug;
    values(i, 0) = in_sample ? 1.0 : 0.0;
    values(i, 1) = drug ? 1.0 : 0.0;
    for (int m = 0; m < 3; ++m) {
      values(i, 2 + m) =
          std::exp(base[m] + (drug ? shift[m] : 0.0) + sd[m] * rng.normal());
    }
  }
  const io::Dataset data({"s", "drug", markers[0], markers[1], markers[2]},
                         values);

  const std::string config_text =
      "family = stack\n"
      "stack.1.family = logistic\n"
      "stack.1.data.outcome = s\n"
      "stack.1.data.regressors = drug\n"
      "stack.2.family = inverse_odds_weighted_mean\n"
      "stack.2.data.biomarkers = sIL2R,IL12,IL10\n";
  ordered_json doc = fit_document("standardize", config_text, data, seed);

  // refit the means with the weights frozen at the fitted coefficients; the
  // point estimates are unchanged but the intervals no longer carry the
  // weight model's uncertainty
  Eigen::VectorXd beta(2);
  beta << doc.at("estimates").at(0).at("value").get<double>(),
      doc.at("estimates").at(1).at("value").get<double>();
  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = values.col(1);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = equations::inverse_odds_weight(X.row(i).transpose(), beta);
  }
  const auto fixed_ef = equations::ee_weighted_means_fixed(
      values.rightCols(3), values.col(0), w);
  const MEstimationResult fixed =
      estimate(fixed_ef, fixed_ef.suggested_init());

  ordered_json fixed_se;
  for (int m = 0; m < 3; ++m) {
    fixed_se["mu_" + markers[m]] = std::sqrt(fixed.covariance(m, m));
  }
  doc["extras"] = {{"fixed_weight_se", fixed_se}};
  write_fit_files(dir, config_text, data, doc, log);

  const double z = stats::normal_quantile(0.975);
  std::string means = "marker,method,estimate,se,ci_lower,ci_upper\n";
  for (int m = 0; m < 3; ++m) {
    const Eigen::VectorXd logb =
        values.col(2 + m).head(n1).array().log().matrix();
    const auto naive_ef = equations::ee_mean(logb);
    const MEstimationResult naive =
        estimate(naive_ef, naive_ef.suggested_init());
    const double nmu = naive.theta_hat[0];
    const double nse = std::sqrt(naive.covariance(0, 0));
    means += markers[m] + ",naive," +
             csv_row({nmu, nse, nmu - z * nse, nmu + z * nse});

    const auto& row = doc.at("estimates").at(2 + m);
    means += markers[m] + ",standardized," +
             csv_row({row.at("value"), row.at("se"), row.at("ci_lower"),
                      row.at("ci_upper")});

    const double fmu = fixed.theta_hat[m];
    const double fse = std::sqrt(fixed.covariance(m, m));
    means += markers[m] + ",fixed_weight," +
             csv_row({fmu, fse, fmu - z * fse, fmu + z * fse});
  }
  write_file(dir / "means.csv", means, log);
}

}  // namespace

void run(const std::string& example, std::uint64_t seed,
         const std::string& out_dir, std::ostream& log) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());
  }
  if (example == "robust-line") {
    robust_line(seed, dir, log);
  } else if (example == "dose-response") {
    dose_response(dir, log);
  } else if (example == "standardize") {
    standardize(seed, dir, log);
  } else {
    throw config::ConfigError("unknown example '" + example +
                              "'; expected robust-line, dose-response, or "
                              "standardize");
  }
}

}  // namespace sandwich::replicate
