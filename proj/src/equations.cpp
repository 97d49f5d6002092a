#include "sandwich/equations.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "sandwich/stats.hpp"

namespace sandwich::equations {

namespace {

void check_threshold(double k) {
  if (!(k > 0.0)) {
    throw DomainError("clipping threshold k must be positive");
  }
}

void check_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw DimensionMismatch("design matrix must be nonempty");
  }
  if (y.size() != X.rows()) {
    throw DimensionMismatch("outcome length must match design rows");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw RankDeficientDesign("design matrix is rank deficient");
  }
}

void check_binary(const Eigen::VectorXd& s, const char* what) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] != 0.0 && s[i] != 1.0) {
      throw DomainError(std::string(what) + " must contain only 0 or 1");
    }
  }
}

struct LogLogisticParams {
  double g1, g2, g3, g4;
};

LogLogisticParams unpack(const Eigen::VectorXd& gamma) {
  if (gamma.size() != 3 && gamma.size() != 4) {
    throw DimensionMismatch("log-logistic curve takes 3 or 4 parameters");
  }
  LogLogisticParams p{gamma[0], gamma[1], gamma[2],
                      gamma.size() == 4 ? gamma[3] : 0.0};
  if (!(p.g1 > 0.0)) {
    throw DomainError("half-effect dose must be positive");
  }
  return p;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double median_positive(const Eigen::VectorXd& v) {
  std::vector<double> pos;
  pos.reserve(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) {
      pos.push_back(v[i]);
    }
  }
  if (pos.empty()) {
    throw DomainError("dose vector needs at least one positive entry");
  }
  return median_of(std::move(pos));
}

// Starting values for the dose-response curve. Plateaus seed from the
// response extremes; the midpoint and steepness come from a least-squares
// line through logit((R - lower)/(upper - lower)) against log dose, the
// usual linearization of the curve over the positive-dose rows. Fractions
// are clamped away from {0, 1} so every row keeps a finite logit. Falls
// back to (median positive dose, unit steepness) when the trend is flat,
// rising, or has fewer than two distinct positive doses.
Eigen::VectorXd loglogistic_start(const Eigen::VectorXd& dose,
                                  const Eigen::VectorXd& resp, int n_params) {
  const double upper = resp.maxCoeff();
  const double lower = n_params == 4 ? resp.minCoeff() : 0.0;
  double ec50 = median_positive(dose);
  double steep = 1.0;
  const double span = upper - lower;
  if (span > 0.0) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < dose.size(); ++i) {
      if (!(dose[i] > 0.0)) {
        continue;
      }
      const double p =
          std::clamp((resp[i] - lower) / span, 1.0 / 40.0, 39.0 / 40.0);
      const double x = std::log(dose[i]);
      const double y = std::log(p / (1.0 - p));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    const double det = static_cast<double>(m) * sxx - sx * sx;
    if (m >= 2 && det > 0.0) {
      const double slope = (static_cast<double>(m) * sxy - sx * sy) / det;
      if (slope < 0.0) {
        steep = -slope;
        ec50 = std::exp((sy - slope * sx) / (static_cast<double>(m) * steep));
      }
    }
  }
  Eigen::VectorXd init(n_params);
  init[0] = ec50;
  init[1] = steep;
  init[2] = upper;
  if (n_params == 4) {
    init[3] = lower;
  }
  return init;
}

}  // namespace

double huber_g(double w, double k) {
  check_threshold(k);
  return std::clamp(w, -k, k);
}

EstimatingFunction ee_mean(const Eigen::VectorXd& y) {
  if (y.size() < 1) {
    throw DimensionMismatch("ee_mean needs at least one observation");
  }
  return EstimatingFunction(1, y.size(), [y](const Eigen::VectorXd& theta) {
    return Eigen::MatrixXd((y.array() - theta[0]).matrix().transpose());
  });
}

EstimatingFunction ee_robust_location(const Eigen::VectorXd& y, double k) {
  if (y.size() < 1) {
    throw DimensionMismatch("ee_robust_location needs at least one observation");
  }
  check_threshold(k);
  EstimatingFunction ef(
      1, y.size(), [y, k](const Eigen::VectorXd& theta) {
        Eigen::MatrixXd out(1, y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
          out(0, i) = huber_g(y[i] - theta[0], k);
        }
        return out;
      });
  // start at the median: at least one residual sits inside the clip band,
  // so the first Jacobian is nonzero even when k is small
  ef.set_init(Eigen::VectorXd::Constant(
      1, median_of({y.data(), y.data() + y.size()})));
  return ef;
}

EstimatingFunction ee_linear_regression(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y) {
  check_design(X, y);
  return EstimatingFunction(
      X.cols(), X.rows(), [X, y](const Eigen::VectorXd& alpha) {
        const Eigen::VectorXd r = y - X * alpha;
        return Eigen::MatrixXd(X.transpose() * r.asDiagonal());
      });
}

EstimatingFunction ee_robust_regression(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y, double k) {
  check_design(X, y);
  check_threshold(k);
  EstimatingFunction ef(
      X.cols(), X.rows(), [X, y, k](const Eigen::VectorXd& alpha) {
        Eigen::VectorXd r = y - X * alpha;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
          r[i] = huber_g(r[i], k);
        }
        return Eigen::MatrixXd(X.transpose() * r.asDiagonal());
      });
  // seed with the least-squares fit; a zero start can clip every residual
  // at once, which flattens the system and stalls the solver
  ef.set_init(X.colPivHouseholderQr().solve(y));
  return ef;
}

EstimatingFunction ee_logistic_regression(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& s) {
  check_design(X, s);
  check_binary(s, "logistic outcome");
  return EstimatingFunction(
      X.cols(), X.rows(), [X, s](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd r(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          r[i] = s[i] - stats::expit(eta[i]);
        }
        return Eigen::MatrixXd(X.transpose() * r.asDiagonal());
      });
}

double loglogistic_mean(double dose, const Eigen::VectorXd& gamma) {
  const LogLogisticParams p = unpack(gamma);
  if (dose < 0.0) {
    throw DomainError("dose must be nonnegative");
  }
  if (dose == 0.0) {
    if (!(p.g2 > 0.0)) {
      throw DomainError("zero dose needs positive steepness");
    }
    return p.g3;
  }
  const double u = p.g2 * (std::log(dose) - std::log(p.g1));
  return p.g4 + (p.g3 - p.g4) * stats::expit(-u);
}

Eigen::VectorXd loglogistic_gradient(double dose, const Eigen::VectorXd& gamma) {
  const LogLogisticParams p = unpack(gamma);
  if (dose < 0.0) {
    throw DomainError("dose must be nonnegative");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(gamma.size());
  if (dose == 0.0) {
    if (!(p.g2 > 0.0)) {
      throw DomainError("zero dose needs positive steepness");
    }
    grad[2] = 1.0;  // f(0) = g3; the g4 share is zero in the limit
    return grad;
  }
  const double ell = std::log(dose) - std::log(p.g1);
  const double u = p.g2 * ell;
  const double q = stats::expit(-u);        // weight on the upper limit
  const double qq = q * stats::expit(u);    // q(1-q), stable in both tails
  grad[0] = (p.g3 - p.g4) * qq * p.g2 / p.g1;
  grad[1] = -(p.g3 - p.g4) * qq * ell;
  grad[2] = q;
  if (gamma.size() == 4) {
    grad[3] = 1.0 - q;
  }
  return grad;
}

EstimatingFunction ee_loglogistic(const Eigen::VectorXd& dose,
                                  const Eigen::VectorXd& resp, int n_params) {
  if (n_params != 3 && n_params != 4) {
    throw DomainError("n_params must be 3 or 4");
  }
  if (dose.size() != resp.size()) {
    throw DimensionMismatch("dose and response lengths must match");
  }
  if (dose.size() < 1) {
    throw DimensionMismatch("ee_loglogistic needs at least one observation");
  }
  if ((dose.array() < 0.0).any()) {
    throw DomainError("doses must be nonnegative");
  }
  if (!resp.allFinite()) {
    throw DomainError("responses must be finite");
  }

  const Eigen::Index n = dose.size();
  EstimatingFunction ef(
      n_params, n, [dose, resp](const Eigen::VectorXd& gamma) {
        Eigen::MatrixXd out(gamma.size(), dose.size());
        for (Eigen::Index i = 0; i < dose.size(); ++i) {
          const double r = resp[i] - loglogistic_mean(dose[i], gamma);
          out.col(i) = r * loglogistic_gradient(dose[i], gamma);
        }
        return out;
      });

  ef.set_init(loglogistic_start(dose, resp, n_params));
  return ef;
}

double effective_concentration(double delta, double ec50, double steepness) {
  if (!(delta > 0.0 && delta < 100.0)) {
    throw DomainError("delta must lie in (0, 100)");
  }
  if (!(ec50 > 0.0)) {
    throw DomainError("half-effect dose must be positive");
  }
  return ec50 * std::pow(delta / (100.0 - delta), 1.0 / steepness);
}

EstimatingFunction ee_effective_concentration(double delta,
                                              Eigen::Index pl_start,
                                              Eigen::Index pl_count,
                                              Eigen::Index n_obs) {
  if (!(delta > 0.0 && delta < 100.0)) {
    throw DomainError("delta must lie in (0, 100)");
  }
  if (pl_count != 3 && pl_count != 4) {
    throw DimensionMismatch("referenced curve block must hold 3 or 4 parameters");
  }
  if (pl_start < 0 || n_obs < 1) {
    throw DimensionMismatch("ee_effective_concentration given a bad layout");
  }

  EstimatingFunction ef(
      1, n_obs, [delta, pl_start, n_obs](const Eigen::VectorXd& theta) {
        if (theta.size() < pl_start + 3) {
          throw DimensionMismatch(
              "parameter vector too short for the referenced curve block");
        }
        const double ec =
            effective_concentration(delta, theta[pl_start], theta[pl_start + 1]);
        return Eigen::MatrixXd::Constant(1, n_obs, ec - theta[theta.size() - 1])
            .eval();
      });
  ef.set_prefix_input(true);
  ef.set_init_from_prefix([delta, pl_start](const Eigen::VectorXd& prefix) {
    if (prefix.size() < pl_start + 2) {
      throw DimensionMismatch(
          "parameter vector too short for the referenced curve block");
    }
    return Eigen::VectorXd::Constant(
        1, effective_concentration(delta, prefix[pl_start], prefix[pl_start + 1]));
  });
  return ef;
}

double inverse_odds_weight(const Eigen::VectorXd& x_row,
                           const Eigen::VectorXd& beta) {
  if (x_row.size() != beta.size()) {
    throw DimensionMismatch("covariate row and coefficient lengths must match");
  }
  return std::exp(-x_row.dot(beta));
}

namespace {

Eigen::MatrixXd checked_log_biomarkers(const Eigen::MatrixXd& biomarkers) {
  if (biomarkers.rows() < 1 || biomarkers.cols() < 1) {
    throw DimensionMismatch("biomarker matrix must be nonempty");
  }
  if (!(biomarkers.array() > 0.0).all()) {
    throw DomainError("biomarker values must be positive");
  }
  return biomarkers.array().log().matrix();
}

Eigen::MatrixXd weighted_mean_rows(const Eigen::MatrixXd& log_b,
                                   const Eigen::VectorXd& sw,
                                   const Eigen::VectorXd& mu) {
  // row j, column i:  sw_i * (log B_ij - mu_j)
  return (log_b.rowwise() - mu.transpose()).transpose() * sw.asDiagonal();
}

Eigen::VectorXd weighted_mean_point(const Eigen::MatrixXd& log_b,
                                    const Eigen::VectorXd& sw) {
  const double total = sw.sum();
  if (!(total > 0.0)) {
    throw DegenerateWeights("weights over the s = 1 rows sum to zero");
  }
  return log_b.transpose() * sw / total;
}

}  // namespace

EstimatingFunction ee_weighted_means(const Eigen::MatrixXd& biomarkers,
                                     const Eigen::VectorXd& s,
                                     const Eigen::MatrixXd& X,
                                     Eigen::Index beta_start,
                                     Eigen::Index beta_count) {
  const Eigen::MatrixXd log_b = checked_log_biomarkers(biomarkers);
  const Eigen::Index n = biomarkers.rows();
  const Eigen::Index m = biomarkers.cols();
  if (s.size() != n || X.rows() != n) {
    throw DimensionMismatch("biomarkers, indicator and covariates must share n");
  }
  check_binary(s, "sample indicator");
  if (s.sum() < 1.0) {
    throw DegenerateWeights("no s = 1 rows to average over");
  }
  if (beta_start < 0 || beta_count != X.cols()) {
    throw DimensionMismatch("coefficient slice must match the covariate count");
  }

  const auto weights_at = [s, X](const Eigen::VectorXd& beta) {
    Eigen::VectorXd sw(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      sw[i] = s[i] == 1.0 ? inverse_odds_weight(X.row(i), beta) : 0.0;
    }
    return sw;
  };

  EstimatingFunction ef(
      m, n,
      [log_b, weights_at, beta_start, beta_count,
       m](const Eigen::VectorXd& theta) {
        if (theta.size() < m || theta.size() - m < beta_start + beta_count) {
          throw DimensionMismatch(
              "parameter vector too short for the referenced coefficient block");
        }
        const Eigen::VectorXd sw =
            weights_at(theta.segment(beta_start, beta_count));
        return weighted_mean_rows(log_b, sw, theta.tail(m));
      });
  ef.set_prefix_input(true);
  ef.set_init_from_prefix([log_b, weights_at, beta_start,
                           beta_count](const Eigen::VectorXd& prefix) {
    if (prefix.size() < beta_start + beta_count) {
      throw DimensionMismatch(
          "parameter vector too short for the referenced coefficient block");
    }
    return weighted_mean_point(
        log_b, weights_at(prefix.segment(beta_start, beta_count)));
  });
  return ef;
}

EstimatingFunction ee_weighted_means_fixed(const Eigen::MatrixXd& biomarkers,
                                           const Eigen::VectorXd& s,
                                           const Eigen::VectorXd& weights) {
  const Eigen::MatrixXd log_b = checked_log_biomarkers(biomarkers);
  const Eigen::Index n = biomarkers.rows();
  const Eigen::Index m = biomarkers.cols();
  if (s.size() != n || weights.size() != n) {
    throw DimensionMismatch("biomarkers, indicator and weights must share n");
  }
  check_binary(s, "sample indicator");
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw DomainError("weights must be finite and nonnegative");
  }

  Eigen::VectorXd sw = (s.array() * weights.array()).matrix();
  EstimatingFunction ef(m, n, [log_b, sw](const Eigen::VectorXd& mu) {
    return weighted_mean_rows(log_b, sw, mu);
  });
  ef.set_init(weighted_mean_point(log_b, sw));
  return ef;
}

EstimatingFunction stack(std::vector<EstimatingFunction> blocks) {
  if (blocks.empty()) {
    throw DimensionMismatch("stack needs at least one block");
  }
  const Eigen::Index n = blocks.front().n_obs();
  std::vector<Eigen::Index> offsets;
  offsets.reserve(blocks.size());
  Eigen::Index v = 0;
  for (const auto& blk : blocks) {
    if (blk.n_obs() != n) {
      throw DimensionMismatch("stacked blocks must share the observation count");
    }
    offsets.push_back(v);
    v += blk.arity();
  }

  auto shared = std::make_shared<std::vector<EstimatingFunction>>(
      std::move(blocks));
  EstimatingFunction combined(
      v, n, [shared, offsets, v, n](const Eigen::VectorXd& theta) {
        Eigen::MatrixXd out(v, n);
        for (std::size_t b = 0; b < shared->size(); ++b) {
          const EstimatingFunction& blk = (*shared)[b];
          out.middleRows(offsets[b], blk.arity()) =
              blk.prefix_input()
                  ? blk.contributions(theta.head(offsets[b] + blk.arity()))
                  : blk.contributions(theta.segment(offsets[b], blk.arity()));
        }
        return out;
      });

  Eigen::VectorXd init(v);
  for (std::size_t b = 0; b < shared->size(); ++b) {
    const EstimatingFunction& blk = (*shared)[b];
    if (blk.prefix_input() && blk.init_from_prefix()) {
      init.segment(offsets[b], blk.arity()) =
          blk.init_from_prefix()(init.head(offsets[b]));
    } else {
      init.segment(offsets[b], blk.arity()) = blk.suggested_init();
    }
  }
  combined.set_init(init);
  return combined;
}

}  // namespace sandwich::equations
