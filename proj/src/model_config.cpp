#include "sandwich/model_config.hpp"

#include "sandwich/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sandwich::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::map<std::string, RawEntry> entries;

  // consume a key; nullptr when absent
  const RawEntry* take(const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      return nullptr;
    }
    it->second.used = true;
    return &it->second;
  }

  const RawEntry& require(const std::string& key) {
    const RawEntry* e = take(key);
    if (e == nullptr) {
      throw ConfigError("missing required key '" + key + "'", 0, key);
    }
    return *e;
  }
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(
          "line " + std::to_string(line_no) + ": expected 'key = value'",
          line_no);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key",
                        line_no);
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                            "' has an empty value",
                        line_no, key);
    }
    const auto [it, fresh] = raw.entries.emplace(key, RawEntry{value, line_no});
    if (!fresh) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": duplicate key '" + key + "' (first on line " +
                            std::to_string(it->second.line) + ")",
                        line_no, key);
    }
  }
  return raw;
}

double parse_double(const RawEntry& e, const std::string& key) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ConfigError("line " + std::to_string(e.line) + ": '" + key +
                          "' must be a finite number, got '" + e.value + "'",
                      e.line, key);
  }
  return v;
}

int parse_int(const RawEntry& e, const std::string& key) {
  int v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("line " + std::to_string(e.line) + ": '" + key +
                          "' must be an integer, got '" + e.value + "'",
                      e.line, key);
  }
  return v;
}

bool parse_bool(const RawEntry& e, const std::string& key) {
  if (e.value == "true") {
    return true;
  }
  if (e.value == "false") {
    return false;
  }
  throw ConfigError("line " + std::to_string(e.line) + ": '" + key +
                        "' must be true or false, got '" + e.value + "'",
                    e.line, key);
}

bool stack_only_family(const std::string& family) {
  return family == "effective_concentration" ||
         family == "inverse_odds_weighted_mean";
}

bool known_family(const std::string& family) {
  static const char* kTags[] = {"mean",         "robust_location",
                                "linear",       "robust_linear",
                                "logistic",     "loglogistic3",
                                "loglogistic4", "effective_concentration",
                                "inverse_odds_weighted_mean"};
  return std::any_of(std::begin(kTags), std::end(kTags),
                     [&](const char* t) { return family == t; });
}

// bindings and options accepted by each family
struct FamilyShape {
  std::vector<std::string> bindings;
  bool takes_k = false;
  bool takes_delta = false;
  bool takes_intercept = false;
};

FamilyShape shape_of(const std::string& family) {
  if (family == "mean") {
    return {{"outcome"}, false, false, false};
  }
  if (family == "robust_location") {
    return {{"outcome"}, true, false, false};
  }
  if (family == "linear") {
    return {{"outcome", "regressors"}, false, false, true};
  }
  if (family == "robust_linear") {
    return {{"outcome", "regressors"}, true, false, true};
  }
  if (family == "logistic") {
    return {{"outcome", "regressors"}, false, false, true};
  }
  if (family == "loglogistic3" || family == "loglogistic4") {
    return {{"dose", "response"}, false, false, false};
  }
  if (family == "effective_concentration") {
    return {{}, false, true, false};
  }
  // inverse_odds_weighted_mean
  return {{"biomarkers"}, false, false, false};
}

BlockSpec parse_block(RawConfig& raw, const std::string& prefix,
                      const RawEntry& family_entry) {
  BlockSpec block;
  block.family = family_entry.value;
  if (block.family == "stack") {
    throw ConfigError("line " + std::to_string(family_entry.line) +
                          ": stacks cannot nest",
                      family_entry.line, prefix + "family");
  }
  if (!known_family(block.family)) {
    throw ConfigError("line " + std::to_string(family_entry.line) +
                          ": unknown family '" + block.family + "'",
                      family_entry.line, prefix + "family");
  }

  const FamilyShape shape = shape_of(block.family);
  for (const std::string& binding : shape.bindings) {
    const std::string key = prefix + "data." + binding;
    const RawEntry& e = raw.require(key);
    block.bindings[binding] = e.value;
  }
  if (shape.takes_k) {
    if (const RawEntry* e = raw.take(prefix + "options.k")) {
      const double k = parse_double(*e, prefix + "options.k");
      if (!(k > 0.0)) {
        throw ConfigError("line " + std::to_string(e->line) +
                              ": k must be positive",
                          e->line, prefix + "options.k");
      }
      block.k = k;
    }
  }
  if (shape.takes_delta) {
    const std::string key = prefix + "options.delta";
    const RawEntry& e = raw.require(key);
    const double delta = parse_double(e, key);
    if (!(delta > 0.0 && delta < 100.0)) {
      throw ConfigError("line " + std::to_string(e.line) +
                            ": delta must lie strictly between 0 and 100",
                        e.line, key);
    }
    block.delta = delta;
  }
  if (shape.takes_intercept) {
    if (const RawEntry* e = raw.take(prefix + "options.intercept")) {
      block.intercept = parse_bool(*e, prefix + "options.intercept");
    }
  }
  return block;
}

void check_block_order(const std::vector<BlockSpec>& blocks) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string& family = blocks[b].family;
    if (family == "effective_concentration") {
      if (b == 0 || blocks[b - 1].family.rfind("loglogistic", 0) != 0) {
        throw ConfigError(
            "effective_concentration must directly follow a loglogistic "
            "block");
      }
    }
    if (family == "inverse_odds_weighted_mean") {
      if (b == 0 || blocks[b - 1].family != "logistic") {
        throw ConfigError(
            "inverse_odds_weighted_mean must directly follow a logistic "
            "block");
      }
    }
  }
}

std::string format_double(double v) { return io::format_number(v); }

void serialize_block(std::ostringstream& out, const std::string& prefix,
                     const BlockSpec& block) {
  out << prefix << "family = " << block.family << "\n";
  for (const auto& [binding, value] : block.bindings) {
    out << prefix << "data." << binding << " = " << value << "\n";
  }
  if (block.delta) {
    out << prefix << "options.delta = " << format_double(*block.delta) << "\n";
  }
  if (block.intercept) {
    out << prefix << "options.intercept = "
        << (*block.intercept ? "true" : "false") << "\n";
  }
  if (block.k) {
    out << prefix << "options.k = " << format_double(*block.k) << "\n";
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line, std::string key)
    : Error(msg), line_(line), key_(std::move(key)) {}

ModelSpec parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  ModelSpec spec;

  const RawEntry& family_entry = raw.require("family");
  spec.family = family_entry.value;

  if (spec.family == "stack") {
    for (int i = 1;; ++i) {
      const std::string prefix = "stack." + std::to_string(i) + ".";
      const RawEntry* block_family = raw.take(prefix + "family");
      if (block_family == nullptr) {
        break;
      }
      spec.blocks.push_back(parse_block(raw, prefix, *block_family));
    }
    if (spec.blocks.empty()) {
      throw ConfigError("family = stack needs at least stack.1.family", 0,
                        "stack.1.family");
    }
    check_block_order(spec.blocks);
  } else {
    spec.blocks.push_back(parse_block(raw, "", family_entry));
    if (stack_only_family(spec.family)) {
      throw ConfigError("family '" + spec.family +
                            "' is only valid as a stack block",
                        family_entry.line, "family");
    }
  }

  if (const RawEntry* e = raw.take("ci_level")) {
    const double level = parse_double(*e, "ci_level");
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("line " + std::to_string(e->line) +
                            ": ci_level must lie strictly between 0 and 1",
                        e->line, "ci_level");
    }
    spec.ci_level = level;
  }
  if (const RawEntry* e = raw.take("solver.tol")) {
    const double tol = parse_double(*e, "solver.tol");
    if (!(tol > 0.0)) {
      throw ConfigError(
          "line " + std::to_string(e->line) + ": solver.tol must be positive",
          e->line, "solver.tol");
    }
    spec.solver_tol = tol;
  }
  if (const RawEntry* e = raw.take("solver.max_iter")) {
    const int cap = parse_int(*e, "solver.max_iter");
    if (cap < 1) {
      throw ConfigError("line " + std::to_string(e->line) +
                            ": solver.max_iter must be at least 1",
                        e->line, "solver.max_iter");
    }
    spec.solver_max_iter = cap;
  }
  if (const RawEntry* e = raw.take("solver.method")) {
    if (e->value != "newton" && e->value != "broyden") {
      throw ConfigError("line " + std::to_string(e->line) +
                            ": solver.method must be newton or broyden",
                        e->line, "solver.method");
    }
    spec.solver_method = e->value;
  }

  for (const auto& [key, entry] : raw.entries) {
    if (!entry.used) {
      throw ConfigError("line " + std::to_string(entry.line) +
                            ": unknown or misplaced key '" + key + "'",
                        entry.line, key);
    }
  }
  return spec;
}

ModelSpec read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ModelSpec& spec) {
  std::ostringstream out;
  if (spec.family == "stack") {
    out << "family = stack\n";
    for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
      serialize_block(out, "stack." + std::to_string(b + 1) + ".",
                      spec.blocks[b]);
    }
  } else {
    serialize_block(out, "", spec.blocks.front());
  }
  out << "ci_level = " << format_double(spec.ci_level) << "\n";
  if (spec.solver_method) {
    out << "solver.method = " << *spec.solver_method << "\n";
  }
  if (spec.solver_tol) {
    out << "solver.tol = " << format_double(*spec.solver_tol) << "\n";
  }
  if (spec.solver_max_iter) {
    out << "solver.max_iter = " << std::to_string(*spec.solver_max_iter)
        << "\n";
  }
  return out.str();
}

}  // namespace sandwich::config
