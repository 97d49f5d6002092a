#pragma once

namespace sandwich::stats {

/// Numerically stable inverse logit, 1 / (1 + exp(-t)).
double expit(double t);

/// Quantile of the standard normal distribution, p in (0, 1).
///
/// Acklam's rational approximation polished with one Halley step against the
/// erfc-based CDF; absolute error is at machine-precision level.
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

}  // namespace sandwich::stats
