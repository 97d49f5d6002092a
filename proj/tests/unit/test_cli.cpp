#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sandwich/cli.hpp"
#include "sandwich/dataset.hpp"
#include "sandwich/model_config.hpp"
#include "sandwich/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path fresh_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("sandwich_cli_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name,
               const std::string& bytes) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// run the whole tool in-process and capture its streams
struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sandwich::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

const char* kMeanConfig = "family = mean\ndata.outcome = y\n";
const char* kMeanCsv = "y\n1\n2\n3\n4\n5\n";

}  // namespace

TEST_CASE("fit writes the document and a summary that quotes it") {
  const fs::path dir = fresh_dir();
  const auto config = write(dir, "model.conf", kMeanConfig);
  const auto data = write(dir, "data.csv", kMeanCsv);
  const auto out_path = dir / "result.json";

  const CliResult r = run_cli(
      {"fit", config.string(), data.string(), "--out", out_path.string()});
  CHECK(r.code == sandwich::cli::kExitOk);
  CHECK(r.err.empty());

  const ordered_json doc = ordered_json::parse(slurp(out_path));
  CHECK(doc.at("tool").at("name") == "sandwich");
  CHECK(doc.at("command") == "fit");
  CHECK(doc.at("model").at("family") == "mean");
  CHECK(doc.at("model").at("n_obs") == 5);
  CHECK(doc.at("solver").at("converged") == true);
  CHECK(doc.at("provenance").at("seed").is_null());
  CHECK(doc.at("estimates").at(0).at("name") == "mu");
  CHECK(doc.at("estimates").at(0).at("value").get<double>() ==
        doctest::Approx(3.0).epsilon(1e-9));

  // every summary number is the document's number under %.6g display
  // rounding - nothing is recomputed
  for (const auto& row : doc.at("estimates")) {
    for (const char* field : {"value", "se", "ci_lower", "ci_upper"}) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.6g", row.at(field).get<double>());
      CAPTURE(field);
      CHECK(r.out.find(buf) != std::string::npos);
    }
  }
}

TEST_CASE("identical inputs give byte-identical documents") {
  const sandwich::config::ModelSpec spec =
      sandwich::config::parse_config(kMeanConfig);
  const sandwich::io::Dataset data = sandwich::io::parse_csv(kMeanCsv);
  const sandwich::runner::RunMeta meta{"fit", kMeanConfig, kMeanCsv, 11};
  const std::string a = sandwich::runner::run_fit(spec, data, meta).dump(2);
  const std::string b = sandwich::runner::run_fit(spec, data, meta).dump(2);
  CHECK(a == b);
}

TEST_CASE("provenance hashes track the exact input bytes") {
  using sandwich::runner::fnv1a_hex;
  CHECK(fnv1a_hex("") == "fnv1a64:cbf29ce484222325");
  CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
  const sandwich::config::ModelSpec spec =
      sandwich::config::parse_config(kMeanConfig);
  const sandwich::io::Dataset data = sandwich::io::parse_csv(kMeanCsv);
  const auto doc = sandwich::runner::run_fit(
      spec, data, {"fit", kMeanConfig, kMeanCsv, {}});
  CHECK(doc.at("provenance").at("config_hash") == fnv1a_hex(kMeanConfig));
  CHECK(doc.at("provenance").at("data_hash") == fnv1a_hex(kMeanCsv));
}

TEST_CASE("exit codes separate config, data, and estimation failures") {
  const fs::path dir = fresh_dir();
  const auto config = write(dir, "model.conf", kMeanConfig);
  const auto data = write(dir, "data.csv", kMeanCsv);

  SUBCASE("ok") {
    const CliResult r = run_cli({"fit", config.string(), data.string(),
                                 "--out", (dir / "r.json").string()});
    CHECK(r.code == 0);
  }
  SUBCASE("bad config text") {
    const auto bad = write(dir, "bad.conf", "family = mean\ndata.outcome = y\nmystery = 1\n");
    const CliResult r = run_cli({"fit", bad.string(), data.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
    CHECK(r.err.find("mystery") != std::string::npos);
  }
  SUBCASE("missing config file") {
    const CliResult r =
        run_cli({"fit", (dir / "nope.conf").string(), data.string()});
    CHECK(r.code == 2);
  }
  SUBCASE("bad data file") {
    const auto bad = write(dir, "bad.csv", "y\nfive\n");
    const CliResult r = run_cli({"fit", config.string(), bad.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("data error") != std::string::npos);
  }
  SUBCASE("missing data file") {
    const CliResult r =
        run_cli({"fit", config.string(), (dir / "nope.csv").string()});
    CHECK(r.code == 3);
  }
  SUBCASE("missing column") {
    const auto other = write(dir, "other.csv", "z\n1\n2\n");
    const CliResult r = run_cli({"fit", config.string(), other.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("'y'") != std::string::npos);
  }
  SUBCASE("iteration cap exhausted still writes the document") {
    const auto slow = write(dir, "slow.conf",
                            "family = logistic\n"
                            "data.outcome = y\n"
                            "data.regressors = x\n"
                            "solver.max_iter = 1\n"
                            "solver.tol = 1e-14\n");
    const auto bin = write(dir, "bin.csv", "y,x\n0,1\n1,2\n0,3\n1,4\n1,5\n");
    const auto out_path = dir / "partial.json";
    const CliResult r = run_cli(
        {"fit", slow.string(), bin.string(), "--out", out_path.string()});
    CHECK(r.code == 4);
    CHECK(r.err.find("iterations") != std::string::npos);
    const ordered_json doc = ordered_json::parse(slurp(out_path));
    CHECK(doc.at("solver").at("converged") == false);
    CHECK(doc.at("solver").at("iterations") == 1);
  }
  SUBCASE("usage problems") {
    CHECK(run_cli({"fit"}).code == 2);               // missing positionals
    CHECK(run_cli({"frobnicate"}).code == 2);        // no such subcommand
    CHECK(run_cli({"replicate", "nope"}).code == 2); // no such example
  }
  SUBCASE("help and version") {
    const CliResult help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("fit") != std::string::npos);
    CHECK(help.out.find("replicate") != std::string::npos);
    const CliResult version = run_cli({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out.find(sandwich::runner::kToolVersion) !=
          std::string::npos);
    const CliResult bare = run_cli({});
    CHECK(bare.code == 0);
    CHECK(bare.out.find("Usage") != std::string::npos);
  }
}

TEST_CASE("solver tolerance precedence: config beats environment") {
  const fs::path dir = fresh_dir();
  const auto data = write(dir, "data.csv", kMeanCsv);
  const auto plain = write(dir, "plain.conf", kMeanConfig);
  const auto pinned = write(dir, "pinned.conf",
                            "family = mean\ndata.outcome = y\n"
                            "solver.tol = 1e-6\n");

  setenv("SANDWICH_SOLVER_TOL", "1e-4", 1);
  const auto out_env = dir / "env.json";
  CHECK(run_cli({"fit", plain.string(), data.string(), "--out",
                 out_env.string()})
            .code == 0);
  CHECK(ordered_json::parse(slurp(out_env)).at("solver").at("tol") == 1e-4);

  const auto out_pinned = dir / "pinned.json";
  CHECK(run_cli({"fit", pinned.string(), data.string(), "--out",
                 out_pinned.string()})
            .code == 0);
  CHECK(ordered_json::parse(slurp(out_pinned)).at("solver").at("tol") ==
        1e-6);

  setenv("SANDWICH_SOLVER_TOL", "zero", 1);
  const CliResult bad =
      run_cli({"fit", plain.string(), data.string(), "--out",
               (dir / "bad.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("SANDWICH_SOLVER_TOL") != std::string::npos);
  unsetenv("SANDWICH_SOLVER_TOL");

  const auto out_default = dir / "default.json";
  CHECK(run_cli({"fit", plain.string(), data.string(), "--out",
                 out_default.string()})
            .code == 0);
  CHECK(ordered_json::parse(slurp(out_default)).at("solver").at("tol") ==
        1e-9);
}

TEST_CASE("replicate reruns are byte-identical; seeds change them") {
  const fs::path a = fresh_dir(), b = fresh_dir(), c = fresh_dir();
  for (const auto* dir : {&a, &b}) {
    const CliResult r =
        run_cli({"replicate", "robust-line", "--out", dir->string()});
    REQUIRE(r.code == 0);
  }
  REQUIRE(run_cli({"replicate", "robust-line", "--seed", "99", "--out",
                   c.string()})
              .code == 0);
  for (const char* name :
       {"config.txt", "points.csv", "results.json", "lines.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
    if (std::string(name) != "config.txt") {
      CHECK(slurp(a / name) != slurp(c / name));
    }
  }
}
