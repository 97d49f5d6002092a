#include "sandwich/numdiff.hpp"

#include <cmath>
#include <limits>

namespace sandwich::numdiff {

double StepRule::default_base_step() {
  return std::cbrt(std::numeric_limits<double>::epsilon());
}

double StepRule::step_for(double xj) const {
  if (mode == Mode::relative) {
    return base_step * std::max(std::abs(xj), 1.0);
  }
  return base_step;
}

namespace {

struct Spread {
  double plus;
  double minus;
  double width;
};

// snap both probe points to what is actually representable and measure their
// true distance; the volatiles stop the compiler from folding the roundings
Spread snapped_spread(double x, double h) {
  volatile double xp = x + h;
  volatile double xm = x - h;
  Spread s{xp, xm, 0.0};
  s.width = s.plus - s.minus;
  return s;
}

}  // namespace

Eigen::MatrixXd jacobian_central(const VectorFn& f, const Eigen::VectorXd& x,
                                 const StepRule& rule) {
  const Eigen::Index v = x.size();
  if (rule.base_step <= 0.0) {
    throw DomainError("StepRule.base_step must be positive");
  }

  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < v; ++j) {
    const Spread s = snapped_spread(x[j], rule.step_for(x[j]));
    if (!(s.width > 0.0)) {
      throw DomainError("finite-difference step underflowed to zero");
    }
    probe[j] = s.plus;
    const Eigen::VectorXd fp = f(probe);
    probe[j] = s.minus;
    const Eigen::VectorXd fm = f(probe);
    probe[j] = x[j];

    if (!fp.allFinite() || !fm.allFinite()) {
      throw NonFiniteEvaluation(
          "function evaluation returned NaN/inf while differentiating "
          "coordinate " +
          std::to_string(j));
    }
    if (fp.size() != fm.size()) {
      throw DimensionMismatch("function output size changed between probes");
    }
    if (jac.size() == 0) {
      jac.resize(fp.size(), v);
    } else if (fp.size() != jac.rows()) {
      throw DimensionMismatch("function output size changed between probes");
    }
    jac.col(j) = (fp - fm) / s.width;
  }
  if (v == 0) {
    jac.resize(0, 0);
  }
  return jac;
}

}  // namespace sandwich::numdiff
