#include "sandwich/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace sandwich::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_cell(const std::string& field, std::size_t line_no,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': cell '" + field + "' is not a plain number");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': cell '" + field + "' is not finite");
  }
  return value;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> columns, Eigen::MatrixXd values)
    : columns_(std::move(columns)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(columns_.size()) != values_.cols()) {
    throw DataError("column-name count does not match the value matrix");
  }
}

bool Dataset::has(const std::string& name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

Eigen::VectorXd Dataset::col(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) {
    throw DataError("no column named '" + name + "' in the data");
  }
  return values_.col(it - columns_.begin());
}

Dataset parse_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) {
        lines.push_back(text.substr(start));
      }
      break;
    }
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(std::move(line));
    start = nl + 1;
  }

  if (lines.empty()) {
    throw DataError("empty file: expected a header row");
  }
  for (const std::string& l : lines) {
    if (l.find('"') != std::string::npos) {
      throw DataError("quoted fields are not part of the accepted dialect");
    }
  }

  const std::vector<std::string> header = split_fields(lines[0]);
  std::unordered_set<std::string> seen;
  for (const std::string& name : header) {
    if (name.empty()) {
      throw DataError("header has an empty column name");
    }
    if (!seen.insert(name).second) {
      throw DataError("duplicate column name '" + name + "' in the header");
    }
  }

  const std::size_t p = header.size();
  const std::size_t n = lines.size() - 1;
  if (n == 0) {
    throw DataError("no data rows after the header");
  }

  Eigen::MatrixXd values(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    const std::vector<std::string> fields = split_fields(lines[r + 1]);
    if (fields.size() != p) {
      throw DataError("line " + std::to_string(r + 2) + ": expected " +
                      std::to_string(p) + " fields, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < p; ++c) {
      values(r, c) = parse_cell(fields[c], r + 2, header[c]);
    }
  }
  return Dataset(header, std::move(values));
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open data file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string format_number(double v) {
  char buf[40];
  for (const int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::strlen(buf), back);
    if (back == v) {
      break;
    }
  }
  return buf;
}

std::string write_csv(const Dataset& data) {
  std::string out;
  for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
    if (c > 0) {
      out += ',';
    }
    out += data.columns()[static_cast<std::size_t>(c)];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < data.n_rows(); ++r) {
    for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
      if (c > 0) {
        out += ',';
      }
      out += format_number(data.values()(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace sandwich::io
