#pragma once

#include <Eigen/Core>
#include <vector>

#include "sandwich/estimator.hpp"

namespace sandwich::equations {

// Huber clipping: w inside [-k, k], sign(w)*k outside.
double huber_g(double w, double k);

EstimatingFunction ee_mean(const Eigen::VectorXd& y);

// psi_i = g_k(y_i - mu). Suggested init: the sample median, which keeps at
// least one residual inside the clip band.
EstimatingFunction ee_robust_location(const Eigen::VectorXd& y, double k);

// psi_i = (y_i - x_i'a) x_i. The design must have full column rank.
EstimatingFunction ee_linear_regression(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y);

// psi_i = g_k(y_i - x_i'a) x_i. Suggested init: the least-squares fit.
EstimatingFunction ee_robust_regression(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y, double k);

// psi_i = (s_i - expit(x_i'b)) x_i with s binary 0/1.
EstimatingFunction ee_logistic_regression(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& s);

// Log-logistic dose-response mean
//   f(D) = g4 + (g3 - g4) / (1 + exp(g2*(log D - log g1)))
// with g1 the half-effect dose, g2 the steepness, g3 the upper limit and g4
// the lower limit. gamma holds (g1, g2, g3) for the 3-parameter curve
// (g4 fixed at 0) or (g1, g2, g3, g4) for the 4-parameter one. f(0) is the
// continuous limit g3, defined for g2 > 0.
double loglogistic_mean(double dose, const Eigen::VectorXd& gamma);

// Analytic d f / d gamma, same length as gamma.
Eigen::VectorXd loglogistic_gradient(double dose, const Eigen::VectorXd& gamma);

// Nonlinear least-squares normal equations for the curve above:
// psi_i = (R_i - f(D_i; gamma)) * grad f(D_i; gamma), n_params in {3, 4}.
// Suggested init: plateaus from the response extremes, midpoint and
// steepness from a logit-vs-log-dose line fit (median positive dose and
// unit steepness when that fit is degenerate).
EstimatingFunction ee_loglogistic(const Eigen::VectorXd& dose,
                                  const Eigen::VectorXd& resp, int n_params);

// Dose achieving a delta-percent drop from the upper toward the lower limit:
// ec50 * (delta / (100 - delta))^(1 / steepness).
double effective_concentration(double delta, double ec50, double steepness);

// One-parameter block pinning theta_EC to the closed form above, replicated
// across all n observations. Prefix-input: meant to ride behind a log-logistic
// block inside stack(); reads (g1, g2) at pl_start of the combined vector.
EstimatingFunction ee_effective_concentration(double delta,
                                              Eigen::Index pl_start,
                                              Eigen::Index pl_count,
                                              Eigen::Index n_obs);

// w = (1 - expit(x'b)) / expit(x'b) = exp(-x'b).
double inverse_odds_weight(const Eigen::VectorXd& x_row,
                           const Eigen::VectorXd& beta);

// Inverse-odds-weighted means of log biomarkers over the s = 1 rows:
// per column m, psi_i = s_i * w_i * (log B_im - mu_m) with w_i built from the
// logistic coefficients living at [beta_start, beta_start + beta_count) of
// the combined vector. Prefix-input; biomarker values must be positive.
EstimatingFunction ee_weighted_means(const Eigen::MatrixXd& biomarkers,
                                     const Eigen::VectorXd& s,
                                     const Eigen::MatrixXd& X,
                                     Eigen::Index beta_start,
                                     Eigen::Index beta_count);

// Same weighted means with the weights frozen at given values, so the weight
// model's uncertainty does NOT propagate. Standalone block.
EstimatingFunction ee_weighted_means_fixed(const Eigen::MatrixXd& biomarkers,
                                           const Eigen::VectorXd& s,
                                           const Eigen::VectorXd& weights);

// Concatenate blocks over one shared parameter vector. Block b owns the
// contiguous slice starting at the sum of the preceding arities; plain blocks
// see exactly their slice, prefix-input blocks see everything up through it.
// Suggested inits are folded left to right so prefix-aware inits can read the
// already-initialized earlier slices.
EstimatingFunction stack(std::vector<EstimatingFunction> blocks);

}  // namespace sandwich::equations
