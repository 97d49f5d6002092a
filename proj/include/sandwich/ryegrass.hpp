#pragma once

#include <Eigen/Core>

namespace sandwich::data {

// Ryegrass root-length dose-response experiment: 24 rows, column 0 the
// herbicide concentration, column 1 the measured root length. Same values as
// data/ryegrass.csv, embedded so the replication command needs no file paths.
const Eigen::MatrixXd& ryegrass();

}  // namespace sandwich::data
