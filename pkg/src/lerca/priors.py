"""Log-priors and prior samplers.

Three ingredients: the experiment-configuration prior over cut points
(proportional to the product of gap widths, subject to minimum-gap
constraints), the paired inclusion prior linking exposure-model and
outcome-model selection of each covariate, and independent normal /
inverse-gamma priors on coefficients and variances.
"""
import math

import numpy as np

from .model import (
    ConfigError,
    ExperimentConfiguration,
    ExperimentParams,
    Hyperparameters,
)

LOG_ZERO = float("-inf")

_MAX_REJECTION_ATTEMPTS = 10**6


def config_log_prior(config: ExperimentConfiguration) -> float:
    """Unnormalized log-density of the cut-point configuration.

    Sum of log gap widths when every gap exceeds its minimum spacing,
    otherwise ``LOG_ZERO``.
    """
    gaps = config.gaps()
    if not np.all(gaps > config.min_gaps):
        return LOG_ZERO
    return float(np.sum(np.log(gaps)))


def sample_config_points(K: int, bounds, min_gaps, rng, size: int) -> np.ndarray:
    """Vectorized draws of internal cut points from the configuration prior.

    Each row of the returned (size, K) array holds the even-numbered order
    statistics of 2K+1 uniforms on ``bounds``, rejection-sampled until all
    gap constraints hold.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not hi > lo:
        raise ConfigError(f"bounds must satisfy lo < hi, got ({lo}, {hi})")
    if K < 0:
        raise ConfigError("K must be >= 0")
    min_gaps = np.asarray(min_gaps, dtype=np.float64)
    if len(min_gaps) != K + 1:
        raise ConfigError(f"min_gaps needs {K + 1} entries, got {len(min_gaps)}")
    if K == 0:
        if hi - lo <= min_gaps[0]:
            raise ConfigError("infeasible min_gaps: whole range violates the single gap")
        return np.empty((size, 0))

    out = np.empty((size, K))
    filled = 0
    attempts = 0
    chunk = max(size, 256)
    while filled < size:
        draws = rng.uniform(lo, hi, size=(chunk, 2 * K + 1))
        draws.sort(axis=1)
        cand = draws[:, 1::2]  # even-numbered order statistics
        edges = np.empty((chunk, K + 2))
        edges[:, 0] = lo
        edges[:, -1] = hi
        edges[:, 1:-1] = cand
        ok = np.all(np.diff(edges, axis=1) > min_gaps, axis=1)
        good = cand[ok]
        take = min(len(good), size - filled)
        out[filled:filled + take] = good[:take]
        filled += take
        attempts += chunk
        if filled == 0 and attempts >= _MAX_REJECTION_ATTEMPTS:
            raise ConfigError(
                f"no valid configuration in {attempts} attempts; min_gaps look infeasible"
            )
    return out


def sample_config_prior(K: int, bounds, min_gaps, rng) -> ExperimentConfiguration:
    """One draw from the configuration prior."""
    pts = sample_config_points(K, bounds, min_gaps, rng, 1)[0]
    return ExperimentConfiguration(pts, bounds[0], bounds[1], np.asarray(min_gaps, dtype=float))


def inclusion_pair_log_probs(hyper: Hyperparameters) -> np.ndarray:
    """2x2 table of log P(alpha_x = a, alpha_y = b) for one covariate.

    Row index a, column index b.  P(alpha_y = 1 | alpha_x = 1) is
    omega / (1 + omega); given alpha_x = 0 the odds are omega0 (1 by
    default, an even coin).
    """
    qx = hyper.alpha_x_marginal
    p1 = hyper.omega / (1.0 + hyper.omega)
    p0 = hyper.omega0 / (1.0 + hyper.omega0)
    tab = np.array([
        [(1.0 - qx) * (1.0 - p0), (1.0 - qx) * p0],
        [qx * (1.0 - p1), qx * p1],
    ])
    with np.errstate(divide="ignore"):
        return np.log(tab)


def inclusion_log_prior(alpha_x, alpha_y, hyper: Hyperparameters) -> float:
    """Joint log-prior of one experiment's inclusion indicator pairs."""
    ax = np.asarray(alpha_x, dtype=np.intp)
    ay = np.asarray(alpha_y, dtype=np.intp)
    if ax.shape != ay.shape:
        raise ConfigError("alpha_x and alpha_y must share length")
    table = inclusion_pair_log_probs(hyper)
    return float(table[ax, ay].sum())


def normal_log_pdf(v: float, mu: float, sigma2: float) -> float:
    return -0.5 * math.log(2.0 * math.pi * sigma2) - (v - mu) ** 2 / (2.0 * sigma2)


def inverse_gamma_log_pdf(v: float, a: float, b: float) -> float:
    return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(v) - b / v


def coefficient_variance_log_priors(params: ExperimentParams, hyper: Hyperparameters,
                                    include_outcome_intercept: bool = False) -> float:
    """Sum of log-priors for one experiment's coefficients and variances.

    Normal(mu0, sigma0^2) terms for the exposure intercept, the slope and
    every included covariate coefficient; inverse-gamma(a0, b0) terms for
    both residual variances.  Excluded coefficients sit on a point mass at
    zero and contribute nothing.  The outcome intercept is a free parameter
    in the first experiment only (it is derived elsewhere); pass
    ``include_outcome_intercept=True`` there.
    """
    mu0, s2 = hyper.mu0, hyper.sigma0 ** 2
    total = normal_log_pdf(params.delta_x0, mu0, s2)
    total += normal_log_pdf(params.beta, mu0, s2)
    if include_outcome_intercept:
        total += normal_log_pdf(params.delta_y0, mu0, s2)
    for j in range(params.p):
        if params.alpha_x[j]:
            total += normal_log_pdf(params.delta_x[j], mu0, s2)
        if params.alpha_y[j]:
            total += normal_log_pdf(params.delta_y[j], mu0, s2)
    total += inverse_gamma_log_pdf(params.sigma2_x, hyper.a0, hyper.b0)
    total += inverse_gamma_log_pdf(params.sigma2_y, hyper.a0, hyper.b0)
    return total
