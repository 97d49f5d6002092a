#include <doctest.h>

#include <string>

#include "sandwich/model_config.hpp"

using sandwich::config::ConfigError;
using sandwich::config::ModelSpec;
using sandwich::config::parse_config;
using sandwich::config::serialize_config;

namespace {

// the error message, line, and key in one assertion-friendly shape
struct Caught {
  std::string msg;
  int line = -1;
  std::string key;
};

Caught catch_config(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return {e.what(), e.line(), e.key()};
  }
  FAIL("expected a ConfigError");
  return {};
}

}  // namespace

TEST_CASE("a minimal single-family config parses") {
  const ModelSpec spec = parse_config(
      "# robust fit\n"
      "family = robust_linear\n"
      "data.outcome = y\n"
      "\n"
      "data.regressors = x1,x2\n"
      "options.k = 1.5\n");
  CHECK(spec.family == "robust_linear");
  REQUIRE(spec.blocks.size() == 1);
  CHECK(spec.blocks[0].bindings.at("outcome") == "y");
  CHECK(spec.blocks[0].bindings.at("regressors") == "x1,x2");
  CHECK(spec.blocks[0].k == 1.5);
  CHECK(!spec.blocks[0].intercept.has_value());
  CHECK(spec.ci_level == 0.95);
  CHECK(!spec.solver_tol.has_value());
}

TEST_CASE("whitespace around keys, values, and '=' is ignored") {
  const ModelSpec spec = parse_config(
      "  family =   mean \n"
      "\tdata.outcome\t= y  \n");
  CHECK(spec.family == "mean");
  CHECK(spec.blocks[0].bindings.at("outcome") == "y");
}

TEST_CASE("stack configs wire blocks in order") {
  const ModelSpec spec = parse_config(
      "family = stack\n"
      "stack.1.family = loglogistic3\n"
      "stack.1.data.dose = conc\n"
      "stack.1.data.response = rootl\n"
      "stack.2.family = effective_concentration\n"
      "stack.2.options.delta = 20\n"
      "ci_level = 0.9\n"
      "solver.method = broyden\n"
      "solver.tol = 1e-10\n"
      "solver.max_iter = 150\n");
  CHECK(spec.family == "stack");
  REQUIRE(spec.blocks.size() == 2);
  CHECK(spec.blocks[0].family == "loglogistic3");
  CHECK(spec.blocks[1].family == "effective_concentration");
  CHECK(spec.blocks[1].delta == 20.0);
  CHECK(spec.ci_level == 0.9);
  CHECK(spec.solver_method == "broyden");
  CHECK(spec.solver_tol == 1e-10);
  CHECK(spec.solver_max_iter == 150);
}

TEST_CASE("diagnostics name the line and the key") {
  SUBCASE("unknown key") {
    const Caught c = catch_config(
        "family = mean\n"
        "data.outcome = y\n"
        "data.wieght = w\n");
    CHECK(c.line == 3);
    CHECK(c.key == "data.wieght");
    CHECK(c.msg.find("line 3") != std::string::npos);
  }
  SUBCASE("unknown family") {
    const Caught c = catch_config("family = linaer\n");
    CHECK(c.line == 1);
    CHECK(c.msg.find("unknown family 'linaer'") != std::string::npos);
  }
  SUBCASE("nonpositive k") {
    const Caught c = catch_config(
        "family = robust_linear\n"
        "data.outcome = y\n"
        "data.regressors = x\n"
        "options.k = -1\n");
    CHECK(c.msg.find("k must be positive") != std::string::npos);
    CHECK(c.line == 4);
  }
  SUBCASE("delta out of range") {
    const Caught c = catch_config(
        "family = stack\n"
        "stack.1.family = loglogistic3\n"
        "stack.1.data.dose = d\n"
        "stack.1.data.response = r\n"
        "stack.2.family = effective_concentration\n"
        "stack.2.options.delta = 100\n");
    CHECK(c.msg.find("delta must lie strictly between 0 and 100") !=
          std::string::npos);
  }
  SUBCASE("duplicate key reports both lines") {
    const Caught c = catch_config(
        "family = mean\n"
        "data.outcome = y\n"
        "data.outcome = z\n");
    CHECK(c.line == 3);
    CHECK(c.msg.find("first on line 2") != std::string::npos);
  }
  SUBCASE("missing '='") {
    const Caught c = catch_config("family mean\n");
    CHECK(c.line == 1);
    CHECK(c.msg.find("expected 'key = value'") != std::string::npos);
  }
  SUBCASE("missing binding") {
    const Caught c = catch_config("family = mean\n");
    CHECK(c.key == "data.outcome");
  }
  SUBCASE("non-numeric option") {
    const Caught c = catch_config(
        "family = mean\n"
        "data.outcome = y\n"
        "ci_level = most\n");
    CHECK(c.line == 3);
    CHECK(c.msg.find("finite number") != std::string::npos);
  }
}

TEST_CASE("stack wiring rules") {
  // transformation blocks only make sense right after their source block
  CHECK_THROWS_AS(parse_config("family = effective_concentration\n"
                               "options.delta = 20\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family = stack\n"
                               "stack.1.family = mean\n"
                               "stack.1.data.outcome = y\n"
                               "stack.2.family = effective_concentration\n"
                               "stack.2.options.delta = 20\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family = stack\n"
                               "stack.1.family = linear\n"
                               "stack.1.data.outcome = s\n"
                               "stack.1.data.regressors = x\n"
                               "stack.2.family = inverse_odds_weighted_mean\n"
                               "stack.2.data.biomarkers = b\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("family = stack\n"), ConfigError);
  // gaps in the block numbering are unknown keys, not silently dropped
  CHECK_THROWS_AS(parse_config("family = stack\n"
                               "stack.1.family = mean\n"
                               "stack.1.data.outcome = y\n"
                               "stack.3.family = mean\n"
                               "stack.3.data.outcome = z\n"),
                  ConfigError);
}

TEST_CASE("serialize -> parse -> serialize is a fixed point") {
  const char* texts[] = {
      "family = mean\ndata.outcome = y\n",
      "options.k = 0.1\nfamily = robust_linear\ndata.regressors = x2,x1\n"
      "data.outcome = y\nci_level = 0.99\nsolver.tol = 1e-12\n",
      "family = stack\n"
      "stack.1.family = logistic\n"
      "stack.1.data.outcome = s\n"
      "stack.1.data.regressors = drug\n"
      "stack.1.options.intercept = true\n"
      "stack.2.family = inverse_odds_weighted_mean\n"
      "stack.2.data.biomarkers = b1,b2\n"
      "solver.method = newton\nsolver.max_iter = 77\n",
  };
  for (const char* text : texts) {
    CAPTURE(text);
    const std::string canon = serialize_config(parse_config(text));
    CHECK(serialize_config(parse_config(canon)) == canon);
  }
}
