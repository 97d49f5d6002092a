#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sandwich/dataset.hpp"
#include "sandwich/estimator.hpp"
#include "sandwich/model_config.hpp"

namespace sandwich::runner {

inline constexpr const char* kToolName = "sandwich";
inline constexpr const char* kToolVersion = "0.1.0";

/// The estimating function a spec describes on a dataset, with one display
/// name per parameter slot.
struct BuiltModel {
  EstimatingFunction ef;
  std::vector<std::string> param_names;
};

/// Construct the (possibly stacked) estimating function for spec over data.
/// Binding problems (absent columns) are DataErrors; value problems that
/// make a family ill-posed (nonpositive biomarkers, negative doses,
/// non-binary outcomes, rank-deficient designs) surface as the library's
/// own errors.
BuiltModel build_model(const config::ModelSpec& spec, const io::Dataset& data);

/// Inputs that only matter for the result document's audit trail.
struct RunMeta {
  std::string command;      // e.g. "fit", "replicate dose-response"
  std::string config_text;  // exact bytes, hashed into provenance
  std::string data_text;    // exact bytes, hashed into provenance
  std::optional<std::uint64_t> seed;
};

/// Fit the model and produce the machine-readable result document:
/// tool info, provenance hashes, parameter table with Wald intervals,
/// solver report, and the bread/filling/covariance matrices in row-major
/// order. Identical spec + data + seed give byte-identical dump() output.
///
/// When the solver runs out of iterations the document is still produced
/// from the best iterate with solver.converged = false (the sandwich
/// matrices too, when they exist at that point); other errors propagate.
///
/// The default solver tolerance (when the configuration sets no solver.tol)
/// can be overridden by the SANDWICH_SOLVER_TOL environment variable; an
/// unparseable or nonpositive value there is a ConfigError.
nlohmann::ordered_json run_fit(const config::ModelSpec& spec,
                               const io::Dataset& data, const RunMeta& meta);

/// Aligned human-readable table rendered purely from the document's fields
/// (values shown with %.6g); no numbers are recomputed.
std::string format_summary(const nlohmann::ordered_json& doc);

/// 64-bit FNV-1a of raw bytes, formatted "fnv1a64:<16 hex digits>".
std::string fnv1a_hex(std::string_view bytes);

}  // namespace sandwich::runner
