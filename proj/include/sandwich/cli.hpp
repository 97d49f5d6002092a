#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sandwich::cli {

// Process exit codes, kept stable for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;    // unexpected failure
inline constexpr int kExitConfig = 2;      // flags, config file, or environment
inline constexpr int kExitData = 3;        // data file or column problems
inline constexpr int kExitEstimation = 4;  // solver could not produce a fit

/// The whole command-line tool, callable in-process for tests: `args` holds
/// the arguments after the program name. Writes to the given streams and
/// returns the exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sandwich::cli
