#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sandwich::replicate {

inline constexpr std::uint64_t kDefaultSeed = 20160229;

/// Regenerate one of the bundled worked examples into `out_dir`:
///
///   robust-line     straight-line fits on a simulated sample with one
///                   planted outlier: least squares with and without the
///                   outlier next to an outlier-resistant fit
///   dose-response   three-parameter log-logistic curve on the bundled
///                   ryegrass data, with the 20% effective concentration
///                   estimated inside the same system
///   standardize     means of log biomarkers from a small convenience
///                   sample, standardized to a second population by
///                   inverse odds weights, with and without propagating
///                   the weight-model uncertainty
///
/// Every example writes config.txt, points.csv, results.json, and
/// summary.txt, plus one plot-data file of its own (lines.csv, curve.csv,
/// or means.csv), and logs each file written to `log`. The seed drives the
/// simulated datasets; dose-response uses bundled measurements and ignores
/// it. Unknown example names are ConfigErrors.
void run(const std::string& example, std::uint64_t seed,
         const std::string& out_dir, std::ostream& log);

}  // namespace sandwich::replicate
