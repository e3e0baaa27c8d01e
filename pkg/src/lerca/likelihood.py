"""Per-experiment likelihood computations.

Three levels are used by the sampler and its tests:

* the conditional data log-likelihood given every parameter, which
  factorizes over experiments and over the exposure/outcome model pair;
* the exact marginal likelihood of a local linear regression with
  independent normal coefficient priors and an inverse-gamma variance
  prior, with coefficients integrated in closed form and the variance by
  adaptive quadrature (small-data test oracle);
* the BIC approximation of the same quantity, used inside move acceptance
  ratios where only differences matter.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import (
    ChainState,
    DataError,
    Dataset,
    ExperimentConfiguration,
    Hyperparameters,
    NumericalError,
)

RSS_FLOOR = 1e-12

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ExperimentSlice:
    """Read-only view of the observations falling in one experiment."""

    indices: np.ndarray
    y: np.ndarray
    x: np.ndarray
    covariates: np.ndarray

    @property
    def n_k(self) -> int:
        return len(self.indices)


def experiment_masks(x: np.ndarray, config: ExperimentConfiguration) -> list:
    """Boolean row masks of every experiment, in exposure order."""
    full = config.full()
    masks = []
    for k in range(config.K + 1):
        m = (x >= full[k]) & (x < full[k + 1])
        if k == config.K:
            m |= x == full[-1]
        masks.append(m)
    return masks


def slice_experiment(data: Dataset, config: ExperimentConfiguration, number: int) -> ExperimentSlice:
    """Extract the slice of experiment ``number`` (1-based, 1..K+1)."""
    if not 1 <= number <= config.K + 1:
        raise DataError(f"experiment number {number} outside 1..{config.K + 1}")
    mask = experiment_masks(data.x, config)[number - 1]
    idx = np.flatnonzero(mask)
    return ExperimentSlice(idx, data.y[idx], data.x[idx], data.covariates[idx])


def obs_log_joint(state: ChainState, data: Dataset) -> np.ndarray:
    """Per-observation log p(x_i, y_i | parameters), length n."""
    if data.p and not data.centered:
        raise DataError("conditional likelihood requires centered covariates")
    out = np.empty(data.n)
    full = state.config.full()
    for k, mask in enumerate(experiment_masks(data.x, state.config)):
        if not np.any(mask):
            continue
        e = state.experiments[k]
        xk = data.x[mask]
        yk = data.y[mask]
        ck = data.covariates[mask]
        mean_x = e.delta_x0 + ck @ e.delta_x
        mean_y = e.delta_y0 + e.beta * (xk - full[k]) + ck @ e.delta_y
        ll = -0.5 * (_LOG_2PI + math.log(e.sigma2_x)) - (xk - mean_x) ** 2 / (2.0 * e.sigma2_x)
        ll += -0.5 * (_LOG_2PI + math.log(e.sigma2_y)) - (yk - mean_y) ** 2 / (2.0 * e.sigma2_y)
        out[mask] = ll
    return out


def conditional_loglik(state: ChainState, data: Dataset) -> float:
    """Total conditional data log-likelihood (sums :func:`obs_log_joint`)."""
    return float(obs_log_joint(state, data).sum())


def _design(slice_: ExperimentSlice, included, response: str,
            offset=None, x_left=None):
    included = np.asarray(included, dtype=bool)
    if len(included) != slice_.covariates.shape[1]:
        raise DataError("included bits must match the covariate count")
    cols = slice_.covariates[:, included]
    if response == "exposure":
        resp = slice_.x
        design = np.column_stack((np.ones(slice_.n_k), cols))
    elif response == "outcome_residual":
        if offset is None:
            raise DataError("outcome_residual needs the intercept+slope offset vector")
        resp = slice_.y - np.asarray(offset, dtype=float)
        design = cols
    elif response == "outcome_full":
        if x_left is None:
            raise DataError("outcome_full needs x_left, the experiment's left boundary")
        resp = slice_.y
        design = np.column_stack((np.ones(slice_.n_k), slice_.x - x_left, cols))
    else:
        raise DataError(f"unknown response kind '{response}'")
    return resp, design, np.flatnonzero(included)


def nig_log_evidence(response: np.ndarray, design: np.ndarray, hyper: Hyperparameters) -> float:
    """Exact log marginal likelihood of a linear model.

    response ~ N(design @ coef, sigma2 I), coef_j ~ N(mu0, sigma0^2) i.i.d.,
    sigma2 ~ InvGamma(a0, b0).  Coefficients integrate in closed form; the
    remaining one-dimensional integral over log sigma2 is evaluated by
    adaptive quadrature after locating the integrand's peak.
    """
    y = np.asarray(response, dtype=float)
    W = np.asarray(design, dtype=float)
    n = len(y)
    if n < 1:
        raise DataError("empty slice")
    q = W.shape[1] if W.ndim == 2 else 0
    a0, b0 = hyper.a0, hyper.b0
    mu0, s20 = hyper.mu0, hyper.sigma0 ** 2

    if q == 0:
        rss = float(y @ y)
        return (-0.5 * n * _LOG_2PI + a0 * math.log(b0) - math.lgamma(a0)
                + math.lgamma(a0 + 0.5 * n) - (a0 + 0.5 * n) * math.log(b0 + 0.5 * rss))

    sv_u, sv, _ = np.linalg.svd(W, full_matrices=False)
    if sv[0] <= 0 or sv[-1] / sv[0] < 1e-10:
        bad = ", ".join(str(i) for i in range(q))
        raise NumericalError(f"collinear design (columns {bad}); cannot integrate")
    r = y - W.sum(axis=1) * mu0
    z = sv_u.T @ r
    s_perp = max(float(r @ r - z @ z), 0.0)
    lam = sv ** 2

    def log_integrand(t):
        v = np.exp(t)
        denom = v + s20 * lam
        val = -0.5 * n * _LOG_2PI
        val -= 0.5 * (n - q) * t
        val -= 0.5 * np.sum(np.log(denom))
        val -= 0.5 * s_perp / v
        val -= 0.5 * np.sum(z ** 2 / denom)
        val += a0 * math.log(b0) - math.lgamma(a0) - (a0 + 1.0) * t - b0 / v
        return val + t  # d(sigma2) = exp(t) dt

    grid = np.linspace(-60.0, 60.0, 1201)
    vals = np.array([log_integrand(t) for t in grid])
    peak = grid[int(np.argmax(vals))]
    shift = float(np.max(vals))

    def integrand(t):
        return math.exp(log_integrand(t) - shift)

    total, _ = integrate.quad(integrand, peak - 60.0, peak + 60.0,
                              limit=400, points=[peak])
    if not total > 0:
        raise NumericalError("marginal likelihood quadrature underflowed")
    return shift + math.log(total)


def marginal_loglik_exact(slice_: ExperimentSlice, included, response: str,
                          hyper: Hyperparameters, offset=None, x_left=None) -> float:
    """Exact marginal log-likelihood of one experiment's local regression.

    ``response`` selects the model: ``"exposure"`` regresses x on an
    intercept plus included covariates; ``"outcome_residual"`` regresses
    y - offset (offset = intercept + slope term, supplied by the caller) on
    the included covariates without an intercept; ``"outcome_full"``
    additionally integrates the outcome intercept and slope columns, for
    enumeration oracles.
    """
    if slice_.n_k < 1:
        raise DataError("empty slice")
    resp, design, inc_idx = _design(slice_, included, response, offset, x_left)
    try:
        return nig_log_evidence(resp, design, hyper)
    except NumericalError:
        cols = ", ".join(str(i) for i in inc_idx)
        raise NumericalError(
            f"collinear included columns [{cols}] in {response} design"
        ) from None


def marginal_loglik_bic(slice_: ExperimentSlice, included, response: str,
                        offset=None, x_left=None) -> float:
    """-BIC/2 from an OLS fit, the move-ratio stand-in for the marginal.

    q_total counts included covariates plus the intercept for the exposure
    model, covariates only for the outcome-residual model; the residual
    variance is profiled out and never counted.
    """
    if response not in ("exposure", "outcome_residual"):
        raise DataError(f"BIC is defined for exposure/outcome_residual, not '{response}'")
    resp, design, _ = _design(slice_, included, response, offset, x_left)
    n = len(resp)
    q_total = design.shape[1]
    if n <= q_total + 1:
        raise DataError(f"slice of {n} observations cannot support {q_total} coefficients")
    if q_total == 0:
        rss = float(resp @ resp)
    else:
        _, res, rank, _ = np.linalg.lstsq(design, resp, rcond=None)
        if rank < q_total or res.size == 0:
            fit = design @ np.linalg.lstsq(design, resp, rcond=None)[0]
            rss = float(np.sum((resp - fit) ** 2))
        else:
            rss = float(res[0])
    rss = max(rss, RSS_FLOOR)
    bic = n * math.log(rss / n) + q_total * math.log(n)
    return -0.5 * bic
