#pragma once

// Reference computations the tests compare the library against. Everything
// here is deliberately built by a DIFFERENT method than the code under test:
// QR instead of root-finding, bisection instead of Newton, grid search
// instead of score equations, so agreement actually means something.

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "sandwich/rng.hpp"

namespace oracle {

// OLS coefficients straight from a column-pivoted QR of the design.
inline Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

// HC0 robust covariance assembled directly from the residuals:
// (X'X)^-1 (sum_i r_i^2 x_i x_i') (X'X)^-1.
inline Eigen::MatrixXd hc0(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta) {
  const Eigen::VectorXd r = y - X * beta;
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    meat += r[i] * r[i] * X.row(i).transpose() * X.row(i);
  }
  return xtx_inv * meat * xtx_inv;
}

// Location estimate for the clipped-residual score by plain bisection. The
// summed score is nonincreasing in mu, so the sign change brackets the root.
inline double robust_location_bisect(const Eigen::VectorXd& y, double k) {
  const auto score = [&](double mu) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double w = y[i] - mu;
      total += w > k ? k : (w < -k ? -k : w);
    }
    return total;
  };
  double lo = y.minCoeff() - 1.0, hi = y.maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double log1pexp(double t) {
  return t > 30.0 ? t : std::log1p(std::exp(t));
}

inline double logistic_loglik(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& s,
                              const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    ll += s[i] * eta[i] - log1pexp(eta[i]);
  }
  return ll;
}

// Two-parameter logistic MLE by shrinking grid search on the log-likelihood.
// Each round scans 21x21 points and zooms to a fifth of the width around the
// best one; twelve rounds take the box from +-5 down to ~1e-8.
inline Eigen::Vector2d logistic_grid_mle(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& s) {
  Eigen::Vector2d center(0.0, 0.0);
  double hw = 5.0;
  for (int round = 0; round < 12; ++round) {
    double best = -1e300;
    Eigen::Vector2d arg = center;
    for (int a = -10; a <= 10; ++a) {
      for (int b = -10; b <= 10; ++b) {
        const Eigen::Vector2d p(center[0] + hw * a / 10.0,
                                center[1] + hw * b / 10.0);
        const double ll = logistic_loglik(X, s, p);
        if (ll > best) {
          best = ll;
          arg = p;
        }
      }
    }
    center = arg;
    hw /= 5.0;
  }
  return center;
}

// Seeded design with an intercept column and standard-normal regressors.
inline Eigen::MatrixXd random_design(sandwich::Rng& rng, Eigen::Index n,
                                     Eigen::Index p) {
  Eigen::MatrixXd X(n, p);
  X.col(0).setOnes();
  for (Eigen::Index j = 1; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      X(i, j) = rng.normal();
    }
  }
  return X;
}

inline Eigen::VectorXd random_vector(sandwich::Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = rng.normal();
  }
  return v;
}

}  // namespace oracle
