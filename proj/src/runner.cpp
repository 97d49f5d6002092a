#include "sandwich/runner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <sstream>

#include "sandwich/equations.hpp"
#include "sandwich/stats.hpp"

namespace sandwich::runner {

namespace {

using config::BlockSpec;
using config::ConfigError;
using config::ModelSpec;
using io::Dataset;
using nlohmann::ordered_json;

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = value.find(',', start);
    std::string item = comma == std::string::npos
                           ? value.substr(start)
                           : value.substr(start, comma - start);
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) {
      item.clear();
    } else {
      const auto e = item.find_last_not_of(" \t");
      item = item.substr(b, e - b + 1);
    }
    out.push_back(std::move(item));
    if (comma == std::string::npos) {
      return out;
    }
    start = comma + 1;
  }
}

// design matrix for the regression families: listed columns, with a leading
// ones column unless options.intercept = false
struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

Design build_design(const BlockSpec& block, const Dataset& data) {
  const std::vector<std::string> cols =
      split_list(block.bindings.at("regressors"));
  const bool intercept = block.intercept.value_or(true);
  Design d;
  d.X.resize(data.n_rows(),
             static_cast<Eigen::Index>(cols.size()) + (intercept ? 1 : 0));
  Eigen::Index j = 0;
  if (intercept) {
    d.X.col(j++).setOnes();
    d.names.push_back("intercept");
  }
  for (const std::string& c : cols) {
    if (c.empty()) {
      throw io::DataError("empty column name in the regressors list");
    }
    d.X.col(j++) = data.col(c);
    d.names.push_back(c);
  }
  return d;
}

constexpr double kDefaultHuberK = 1.345;

std::string format_g(double v, int precision = 6) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

struct BuiltBlock {
  EstimatingFunction ef;
  std::vector<std::string> names;
};

BuiltBlock build_block(const BlockSpec& block, const Dataset& data,
                       const std::vector<BlockSpec>& previous,
                       const std::vector<Eigen::Index>& offsets) {
  namespace eq = sandwich::equations;
  const std::string& family = block.family;

  if (family == "mean") {
    return {eq::ee_mean(data.col(block.bindings.at("outcome"))), {"mu"}};
  }
  if (family == "robust_location") {
    return {eq::ee_robust_location(data.col(block.bindings.at("outcome")),
                                   block.k.value_or(kDefaultHuberK)),
            {"mu"}};
  }
  if (family == "linear" || family == "robust_linear" ||
      family == "logistic") {
    Design d = build_design(block, data);
    const Eigen::VectorXd y = data.col(block.bindings.at("outcome"));
    if (family == "linear") {
      return {eq::ee_linear_regression(d.X, y), std::move(d.names)};
    }
    if (family == "robust_linear") {
      return {eq::ee_robust_regression(d.X, y,
                                       block.k.value_or(kDefaultHuberK)),
              std::move(d.names)};
    }
    return {eq::ee_logistic_regression(d.X, y), std::move(d.names)};
  }
  if (family == "loglogistic3" || family == "loglogistic4") {
    const int n_params = family == "loglogistic4" ? 4 : 3;
    std::vector<std::string> names{"ec50", "steepness", "upper_limit"};
    if (n_params == 4) {
      names.push_back("lower_limit");
    }
    return {eq::ee_loglogistic(data.col(block.bindings.at("dose")),
                               data.col(block.bindings.at("response")),
                               n_params),
            std::move(names)};
  }
  if (family == "effective_concentration") {
    // config validation guarantees the preceding block is a loglogistic one
    const std::size_t prev = previous.size() - 1;
    const Eigen::Index pl_start = offsets[prev];
    const Eigen::Index pl_count =
        previous[prev].family == "loglogistic4" ? 4 : 3;
    const double delta = *block.delta;
    return {eq::ee_effective_concentration(delta, pl_start, pl_count,
                                           data.n_rows()),
            {"ec" + format_g(delta)}};
  }
  if (family == "inverse_odds_weighted_mean") {
    const std::size_t prev = previous.size() - 1;
    const BlockSpec& weight_model = previous[prev];
    const Design d = build_design(weight_model, data);
    const Eigen::VectorXd s = data.col(weight_model.bindings.at("outcome"));
    const std::vector<std::string> marker_cols =
        split_list(block.bindings.at("biomarkers"));
    Eigen::MatrixXd markers(data.n_rows(),
                            static_cast<Eigen::Index>(marker_cols.size()));
    std::vector<std::string> names;
    Eigen::Index j = 0;
    for (const std::string& c : marker_cols) {
      if (c.empty()) {
        throw io::DataError("empty column name in the biomarkers list");
      }
      markers.col(j++) = data.col(c);
      names.push_back("mu_" + c);
    }
    return {eq::ee_weighted_means(markers, s, d.X, offsets[prev],
                                  static_cast<Eigen::Index>(d.names.size())),
            std::move(names)};
  }
  throw ConfigError("unknown family '" + family + "'");
}

rootfind::SolverConfig resolve_solver(const ModelSpec& spec) {
  rootfind::SolverConfig cfg;
  if (spec.solver_method && *spec.solver_method == "broyden") {
    cfg.method = rootfind::SolverConfig::Method::broyden;
  }
  if (spec.solver_max_iter) {
    cfg.max_iter = *spec.solver_max_iter;
  }
  if (spec.solver_tol) {
    cfg.tol = *spec.solver_tol;
  } else if (const char* env = std::getenv("SANDWICH_SOLVER_TOL")) {
    double tol = 0.0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, tol);
    if (ec != std::errc{} || ptr != end || !(tol > 0.0)) {
      throw ConfigError(
          "SANDWICH_SOLVER_TOL must be a positive number, got '" +
          std::string(env) + "'");
    }
    cfg.tol = tol;
  }
  return cfg;
}

ordered_json matrix_row_major(const Eigen::MatrixXd& m) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(m(r, c));
    }
  }
  return arr;
}

}  // namespace

BuiltModel build_model(const ModelSpec& spec, const Dataset& data) {
  std::vector<BuiltBlock> built;
  std::vector<BlockSpec> previous;
  std::vector<Eigen::Index> offsets;
  Eigen::Index offset = 0;
  for (const BlockSpec& block : spec.blocks) {
    built.push_back(build_block(block, data, previous, offsets));
    previous.push_back(block);
    offsets.push_back(offset);
    offset += built.back().ef.arity();
  }

  std::vector<std::string> names;
  for (BuiltBlock& bb : built) {
    for (std::string& name : bb.names) {
      names.push_back(std::move(name));
    }
  }
  if (spec.family == "stack") {
    std::vector<EstimatingFunction> blocks;
    for (BuiltBlock& bb : built) {
      blocks.push_back(std::move(bb.ef));
    }
    return {equations::stack(std::move(blocks)), std::move(names)};
  }
  return {std::move(built.front().ef), std::move(names)};
}

ordered_json run_fit(const ModelSpec& spec, const Dataset& data,
                     const RunMeta& meta) {
  const BuiltModel model = build_model(spec, data);
  const rootfind::SolverConfig solver_cfg = resolve_solver(spec);

  MEstimationResult res;
  bool have_sandwich = true;
  try {
    res = estimate(model.ef, model.ef.suggested_init(), solver_cfg);
  } catch (const rootfind::NoConvergence& e) {
    // report the best iterate; the sandwich there may not exist
    res.report = e.report();
    res.theta_hat = e.report().root;
    try {
      res.bread = compute_bread(model.ef, res.theta_hat);
      res.filling = compute_filling(model.ef, res.theta_hat);
      std::tie(res.asymptotic_variance, res.covariance) =
          sandwich_variance(res.bread, res.filling, model.ef.n_obs());
    } catch (const Error&) {
      have_sandwich = false;
    }
  }

  ordered_json doc;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["command"] = meta.command;
  doc["provenance"] = {
      {"config_hash", fnv1a_hex(meta.config_text)},
      {"data_hash", fnv1a_hex(meta.data_text)},
      {"seed", meta.seed ? ordered_json(*meta.seed) : ordered_json(nullptr)}};
  doc["model"] = {{"family", spec.family},
                  {"parameters", model.param_names},
                  {"n_obs", model.ef.n_obs()},
                  {"n_params", model.ef.arity()},
                  {"ci_level", spec.ci_level}};
  doc["solver"] = {
      {"method", solver_cfg.method == rootfind::SolverConfig::Method::broyden
                     ? "broyden"
                     : "newton"},
      {"tol", solver_cfg.tol},
      {"max_iter", solver_cfg.max_iter},
      {"converged", res.report.converged},
      {"iterations", res.report.iterations},
      {"residual_norm", res.report.residual_norm}};

  const double z =
      stats::normal_quantile(1.0 - (1.0 - spec.ci_level) / 2.0);
  doc["estimates"] = ordered_json::array();
  for (Eigen::Index j = 0; j < model.ef.arity(); ++j) {
    ordered_json row;
    row["name"] = model.param_names[j];
    row["value"] = res.theta_hat[j];
    if (have_sandwich) {
      const double se = std::sqrt(res.covariance(j, j));
      row["se"] = se;
      row["ci_lower"] = res.theta_hat[j] - z * se;
      row["ci_upper"] = res.theta_hat[j] + z * se;
    } else {
      row["se"] = nullptr;
      row["ci_lower"] = nullptr;
      row["ci_upper"] = nullptr;
    }
    doc["estimates"].push_back(std::move(row));
  }

  if (have_sandwich) {
    doc["matrices"] = {{"layout", "row-major"},
                       {"dim", model.ef.arity()},
                       {"bread", matrix_row_major(res.bread)},
                       {"filling", matrix_row_major(res.filling)},
                       {"asymptotic_variance",
                        matrix_row_major(res.asymptotic_variance)},
                       {"covariance", matrix_row_major(res.covariance)}};
  } else {
    doc["matrices"] = nullptr;
  }
  return doc;
}

std::string format_summary(const ordered_json& doc) {
  std::ostringstream out;
  const auto& model = doc.at("model");
  const auto& solver = doc.at("solver");
  out << "family: " << model.at("family").get<std::string>()
      << "   n = " << model.at("n_obs").get<long>() << "\n";
  out << "solver: " << solver.at("method").get<std::string>() << ", "
      << (solver.at("converged").get<bool>() ? "converged" : "NOT converged")
      << " after " << solver.at("iterations").get<int>()
      << " iterations, residual "
      << format_g(solver.at("residual_norm").get<double>(), 3) << "\n\n";

  std::size_t name_width = std::string("parameter").size();
  for (const auto& row : doc.at("estimates")) {
    name_width =
        std::max(name_width, row.at("name").get<std::string>().size());
  }

  const double level = model.at("ci_level").get<double>();
  char head[160];
  std::snprintf(head, sizeof(head), "%-*s  %12s  %12s  %s\n",
                static_cast<int>(name_width), "parameter", "estimate", "se",
                (format_g(level * 100.0) + "% CI").c_str());
  out << head;
  for (const auto& row : doc.at("estimates")) {
    const std::string name = row.at("name").get<std::string>();
    char line[240];
    if (row.at("se").is_null()) {
      std::snprintf(line, sizeof(line), "%-*s  %12s  %12s  %s\n",
                    static_cast<int>(name_width), name.c_str(),
                    format_g(row.at("value").get<double>()).c_str(), "n/a",
                    "n/a");
    } else {
      std::snprintf(line, sizeof(line), "%-*s  %12s  %12s  (%s, %s)\n",
                    static_cast<int>(name_width), name.c_str(),
                    format_g(row.at("value").get<double>()).c_str(),
                    format_g(row.at("se").get<double>()).c_str(),
                    format_g(row.at("ci_lower").get<double>()).c_str(),
                    format_g(row.at("ci_upper").get<double>()).c_str());
    }
    out << line;
  }
  return out.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sandwich::runner
