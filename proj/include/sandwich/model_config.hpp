#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sandwich/errors.hpp"

namespace sandwich::config {

// A malformed or invalid model configuration. Carries the 1-based line of
// the offending entry (0 when no single line is to blame) and the dotted
// key when one is.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0,
                       std::string key = {});
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// One estimating-equation block: its family tag, the data bindings
/// (column names; list-valued bindings hold comma-separated names), and the
/// family options that were given. Defaults are applied at build time.
struct BlockSpec {
  std::string family;
  std::map<std::string, std::string> bindings;
  std::optional<double> k;
  std::optional<double> delta;
  std::optional<bool> intercept;
};

/// A parsed, validated model configuration.
///
/// The accepted text format is flat `key = value` lines with `#` comments
/// and blank lines ignored. Keys:
///
///   family = mean | robust_location | linear | robust_linear | logistic |
///            loglogistic3 | loglogistic4 | stack
///   data.<binding> = column[, column...]      bindings depend on family
///   options.k / options.delta / options.intercept
///   stack.<i>.family, stack.<i>.data.*, stack.<i>.options.*   (i = 1..m)
///   ci_level = level in (0, 1)                 default 0.95
///   solver.method = newton | broyden
///   solver.tol = positive real
///   solver.max_iter = positive integer
///
/// Bindings by family: mean and robust_location take data.outcome; the
/// regression families take data.outcome and data.regressors (an intercept
/// column is prepended unless options.intercept = false); the loglogistic
/// families take data.dose and data.response. Two families are only valid
/// as stack blocks: effective_concentration (options.delta, no bindings)
/// directly after a loglogistic block, and inverse_odds_weighted_mean
/// (data.biomarkers) directly after a logistic block whose outcome marks
/// the source sample.
struct ModelSpec {
  std::string family;             // top-level tag; "stack" for stacks
  std::vector<BlockSpec> blocks;  // one entry unless family == "stack"
  double ci_level = 0.95;
  std::optional<double> solver_tol;
  std::optional<int> solver_max_iter;
  std::optional<std::string> solver_method;
};

/// Parse and fully validate configuration text. Unknown or duplicate keys,
/// missing bindings, out-of-range options, and bad stack wiring are all
/// ConfigErrors naming the line and key; nothing is silently ignored.
ModelSpec parse_config(const std::string& text);

/// parse_config on the contents of `path`; unreadable files are ConfigErrors.
ModelSpec read_config(const std::string& path);

/// Canonical text for a spec: fixed key order, shortest round-trip numbers.
/// serialize -> parse -> serialize reproduces the same bytes.
std::string serialize_config(const ModelSpec& spec);

}  // namespace sandwich::config
