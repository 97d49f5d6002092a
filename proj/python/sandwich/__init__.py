"""M-estimation with empirical sandwich variances.

Each fit solves the stacked estimating equations for the parameters and
returns the point estimates together with the sandwich covariance, so the
reported intervals account for every nuisance quantity estimated along the
way. ``fit_config`` accepts the same declarative configuration text as the
command-line tool and returns its JSON result document.
"""

from ._core import (
    ConfigError,
    DataError,
    EstimationError,
    __version__,
    dose_response_ec,
    fit_config,
    inverse_odds_means,
    linear,
    logistic,
    loglogistic,
    mean,
    robust_linear,
    robust_location,
)

__all__ = [
    "ConfigError",
    "DataError",
    "EstimationError",
    "__version__",
    "dose_response_ec",
    "fit_config",
    "inverse_odds_means",
    "linear",
    "logistic",
    "loglogistic",
    "mean",
    "robust_linear",
    "robust_location",
]
