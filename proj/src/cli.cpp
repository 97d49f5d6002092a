#include "sandwich/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sandwich/dataset.hpp"
#include "sandwich/errors.hpp"
#include "sandwich/model_config.hpp"
#include "sandwich/replicate.hpp"
#include "sandwich/runner.hpp"

namespace sandwich::cli {

namespace {

// read exact bytes; the same bytes are hashed into the result's provenance
template <typename ErrorType>
std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ErrorType("cannot open " + std::string(what) + " '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file '" + path + "'");
  }
  out << bytes;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out_path, std::ostream& out, std::ostream& err) {
  const std::string config_text =
      slurp<config::ConfigError>(config_path, "config file");
  const config::ModelSpec spec = config::parse_config(config_text);
  const std::string data_text = slurp<io::DataError>(data_path, "data file");
  const io::Dataset data = io::parse_csv(data_text);

  const nlohmann::ordered_json doc =
      runner::run_fit(spec, data, {"fit", config_text, data_text, {}});
  write_file(out_path, doc.dump(2) + "\n");
  out << runner::format_summary(doc) << "\nresults written to " << out_path
      << "\n";
  if (!doc.at("solver").at("converged").get<bool>()) {
    err << "the solver ran out of iterations; results hold the best iterate "
           "(see the solver block in "
        << out_path << ")\n";
    return kExitEstimation;
  }
  return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"M-estimation with empirical sandwich variances", "sandwich"};
  app.set_version_flag("--version", std::string(runner::kToolVersion));

  std::string config_path;
  std::string data_path;
  std::string fit_out = "result.json";
  CLI::App* fit = app.add_subcommand(
      "fit", "estimate a configured model from a CSV file");
  fit->add_option("config", config_path, "model configuration file")
      ->required();
  fit->add_option("data", data_path, "CSV data file")->required();
  fit->add_option("--out", fit_out, "where to write the JSON results")
      ->capture_default_str();

  std::string example;
  std::uint64_t seed = replicate::kDefaultSeed;
  std::string rep_out = ".";
  CLI::App* rep = app.add_subcommand(
      "replicate", "regenerate a bundled worked example end to end");
  rep->add_option("example", example,
                  "one of: robust-line, dose-response, standardize")
      ->required();
  rep->add_option("--seed", seed, "seed for the simulated datasets")
      ->capture_default_str();
  rep->add_option("--out", rep_out, "directory for the generated files")
      ->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (fit->parsed()) {
      return cmd_fit(config_path, data_path, fit_out, out, err);
    }
    if (rep->parsed()) {
      replicate::run(example, seed, rep_out, out);
      return kExitOk;
    }
    out << app.help();
    return kExitOk;
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const io::DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "estimation error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace sandwich::cli
