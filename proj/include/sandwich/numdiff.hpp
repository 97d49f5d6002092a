#pragma once

#include <Eigen/Core>
#include <functional>

#include "sandwich/errors.hpp"

namespace sandwich::numdiff {

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Per-coordinate step selection for central differences.
struct StepRule {
  enum class Mode { absolute, relative };

  Mode mode = Mode::relative;
  double base_step = default_base_step();

  // cbrt(machine epsilon), the usual truncation/roundoff compromise
  static double default_base_step();

  // h_j for coordinate value xj; relative mode scales by max(|xj|, 1)
  double step_for(double xj) const;
};

/// Central-difference Jacobian of f at x.
///
/// Entry (i,j) = (f_i(x + h_j e_j) - f_i(x - h_j e_j)) / (2 h_j), where both
/// probe points are snapped to their nearest representables and the divisor
/// is their measured spread. Output has one row per component of f(x) and one
/// column per coordinate of x. Throws NonFiniteEvaluation if any probe yields
/// NaN or infinity.
Eigen::MatrixXd jacobian_central(const VectorFn& f, const Eigen::VectorXd& x,
                                 const StepRule& rule = StepRule{});

}  // namespace sandwich::numdiff
