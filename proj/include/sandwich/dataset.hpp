#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sandwich/errors.hpp"

namespace sandwich::io {

// Anything wrong with the data file: unreadable, malformed CSV, non-numeric
// or missing cells, duplicate/empty column names, or a referenced column
// that does not exist.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A rectangular all-numeric table with named columns.
class Dataset {
 public:
  Dataset(std::vector<std::string> columns, Eigen::MatrixXd values);

  Eigen::Index n_rows() const { return values_.rows(); }
  Eigen::Index n_cols() const { return values_.cols(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const Eigen::MatrixXd& values() const { return values_; }

  bool has(const std::string& name) const;
  /// Column by name; throws DataError naming the column when absent.
  Eigen::VectorXd col(const std::string& name) const;

 private:
  std::vector<std::string> columns_;
  Eigen::MatrixXd values_;
};

/// Strict CSV: comma separated, first row is the header, period decimal
/// separator, no quoting. Every row must have the same number of fields,
/// every cell must parse fully as a finite number, and column names must be
/// nonempty and unique. Lines may end in LF or CRLF; a trailing newline on
/// the last row is optional. At least one data row is required.
Dataset parse_csv(const std::string& text);

/// parse_csv on the contents of `path`; unreadable files are DataErrors.
Dataset read_csv(const std::string& path);

/// Shortest decimal text that parses back to exactly `v` (tries %.15g, then
/// widens). The writer-side companion of the strict CSV dialect.
std::string format_number(double v);

/// Render a table in the same dialect parse_csv accepts (LF line endings,
/// round-trip-exact numbers).
std::string write_csv(const Dataset& data);

}  // namespace sandwich::io
