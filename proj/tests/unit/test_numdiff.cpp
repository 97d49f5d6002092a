#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "sandwich/errors.hpp"
#include "sandwich/numdiff.hpp"

using sandwich::numdiff::jacobian_central;
using sandwich::numdiff::StepRule;

namespace {

StepRule absolute_step(double h) {
  StepRule r;
  r.mode = StepRule::Mode::absolute;
  r.base_step = h;
  return r;
}

}  // namespace

TEST_CASE("quadratic-and-coordinate system hits the analytic Jacobian") {
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::Vector2d(x[0] * x[0], x[1]);
  };
  const Eigen::MatrixXd jac =
      jacobian_central(f, Eigen::Vector2d(3.0, 5.0), absolute_step(1e-5));
  CHECK(std::abs(jac(0, 0) - 6.0) < 1e-9);
  CHECK(jac(0, 1) == 0.0);
  CHECK(jac(1, 0) == 0.0);
  CHECK(std::abs(jac(1, 1) - 1.0) < 1e-12);
}

TEST_CASE("identity map differentiates to the exact identity matrix") {
  const auto f = [](const Eigen::VectorXd& x) { return x; };
  const Eigen::MatrixXd jac = jacobian_central(f, Eigen::Vector3d(1.0, -2.5, 7.0));
  CHECK(jac == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("sine derivative at 0.7") {
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, std::sin(x[0]));
  };
  const Eigen::MatrixXd jac =
      jacobian_central(f, Eigen::VectorXd::Constant(1, 0.7));
  CHECK(std::abs(jac(0, 0) - std::cos(0.7)) < 1e-8);
}

TEST_CASE("affine maps are recovered exactly up to roundoff at any step") {
  Eigen::MatrixXd a(3, 3);
  a << 2.0, -1.0, 0.5, 0.0, 3.0, -2.0, 1.5, 1.0, 4.0;
  const Eigen::Vector3d b(0.3, -0.7, 2.0);
  const auto f = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(a * x + b);
  };
  const Eigen::Vector3d x(0.9, -1.4, 3.3);
  // no truncation error on an affine map; what remains is rounding of the
  // two f evaluations, of order eps * |f| / step
  const double fmax = f(x).cwiseAbs().maxCoeff();
  for (const double h : {1e-6, 1e-3, 0.1}) {
    const Eigen::MatrixXd jac = jacobian_central(f, x, absolute_step(h));
    const double roundoff =
        4.0 * std::numeric_limits<double>::epsilon() * fmax / h;
    CHECK((jac - a).cwiseAbs().maxCoeff() < roundoff + 1e-12);
  }
}

TEST_CASE("halving the step quarters the truncation error on a cubic") {
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, x[0] * x[0] * x[0]);
  };
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  const double exact = 12.0;
  const double e1 =
      std::abs(jacobian_central(f, x, absolute_step(1e-3))(0, 0) - exact);
  const double e2 =
      std::abs(jacobian_central(f, x, absolute_step(5e-4))(0, 0) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("the probed point is never mutated") {
  const Eigen::Vector2d x(1.25, -0.5);
  const Eigen::Vector2d copy = x;
  const auto f = [](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(2.0 * v);
  };
  jacobian_central(f, x);
  CHECK(x == copy);
}

TEST_CASE("rectangular outputs keep one row per component") {
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::Vector3d(x[0], x[1], x[0] * x[1]);
  };
  const Eigen::MatrixXd jac = jacobian_central(f, Eigen::Vector2d(2.0, 3.0));
  REQUIRE(jac.rows() == 3);
  REQUIRE(jac.cols() == 2);
  CHECK(std::abs(jac(2, 0) - 3.0) < 1e-8);
  CHECK(std::abs(jac(2, 1) - 2.0) < 1e-8);
}

TEST_CASE("non-finite probes are reported, not propagated") {
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, std::log(x[0]));
  };
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1e-8);
  CHECK_THROWS_AS(jacobian_central(f, x, absolute_step(1e-3)),
                  sandwich::NonFiniteEvaluation);
}

TEST_CASE("step rule validation") {
  const auto f = [](const Eigen::VectorXd& x) { return x; };
  CHECK_THROWS_AS(
      jacobian_central(f, Eigen::VectorXd::Zero(1), absolute_step(0.0)),
      sandwich::DomainError);
  CHECK_THROWS_AS(
      jacobian_central(f, Eigen::VectorXd::Zero(1), absolute_step(-1.0)),
      sandwich::DomainError);
}

TEST_CASE("relative mode scales the step with the coordinate") {
  // at x = 1e8 an absolute 6e-6 step would be swallowed by roundoff; the
  // relative default survives it
  const auto f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, x[0] * x[0]);
  };
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1e8);
  const Eigen::MatrixXd jac = jacobian_central(f, x);
  CHECK(std::abs(jac(0, 0) - 2e8) / 2e8 < 1e-9);
}
