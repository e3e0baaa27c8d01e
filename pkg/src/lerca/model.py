"""Core domain types and exposure-response curve evaluation.

The exposure range [s_min, s_max] is partitioned by K internal cut points
into K+1 segments called experiments, g_k = [s_{k-1}, s_k).  Within each
experiment a pair of linear models (exposure on covariates, outcome on
exposure and covariates) holds, and the outcome intercepts of experiments
2..K+1 are determined recursively so the fitted mean response is continuous
across cut points.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


class LercaError(Exception):
    """Base class for package errors."""


class ConfigError(LercaError):
    """Invalid run configuration or invalid constructor arguments."""


class DataError(LercaError):
    """Invalid or out-of-range data."""


class NumericalError(LercaError):
    """Numerical failure (singular system, degenerate posterior, ...)."""


class ConsistencyError(LercaError):
    """Parameter state violates a structural invariant."""


def _as_float_array(a, name, ndim):
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ConfigError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Dataset:
    """Observed outcomes, exposures and covariates.

    Parameters
    ----------
    y : array, shape (n,)
        Outcome values.
    x : array, shape (n,)
        Exposure values.
    covariates : array, shape (n, p)
        Covariate table; p may be 0.
    names : tuple of str
        Covariate column labels, length p.
    centered : bool
        True once every covariate column has mean zero.
    covariate_means : array or None
        Original column means, recorded by :func:`center_covariates`.
    """

    y: np.ndarray
    x: np.ndarray
    covariates: np.ndarray
    names: Tuple[str, ...]
    centered: bool = False
    covariate_means: Optional[np.ndarray] = None

    def __post_init__(self):
        y = _as_float_array(self.y, "y", 1)
        x = _as_float_array(self.x, "x", 1)
        c = np.asarray(self.covariates, dtype=np.float64)
        if c.ndim == 1:
            c = c.reshape(len(c), -1) if c.size else c.reshape(len(y), 0)
        if c.ndim != 2:
            raise ConfigError(f"covariates must be 2-dimensional, got shape {c.shape}")
        n = len(y)
        if n < 1:
            raise DataError("empty dataset: need n >= 1")
        if len(x) != n or c.shape[0] != n:
            raise DataError(
                f"length mismatch: y has {n}, x has {len(x)}, covariates have {c.shape[0]} rows"
            )
        names = tuple(str(s) for s in self.names)
        if len(names) != c.shape[1]:
            raise DataError(
                f"{len(names)} covariate names for {c.shape[1]} columns"
            )
        for label, arr in (("y", y), ("x", x)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise DataError(f"non-finite value in column '{label}' at row {bad[0]}")
        if c.size:
            bad = np.argwhere(~np.isfinite(c))
            if bad.size:
                i, j = bad[0]
                raise DataError(
                    f"non-finite value in covariate '{names[j]}' at row {i}"
                )
        if self.centered and c.size:
            worst = float(np.max(np.abs(c.mean(axis=0))))
            if worst > 1e-10:
                raise DataError(
                    f"dataset flagged centered but a column mean is {worst:.3e}"
                )
        for name, arr in (("y", y), ("x", x), ("covariates", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "names", names)
        if self.covariate_means is not None:
            m = _as_float_array(self.covariate_means, "covariate_means", 1)
            m.setflags(write=False)
            object.__setattr__(self, "covariate_means", m)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.covariates.shape[1]


def default_min_gaps(K: int, s_min: float, s_max: float) -> np.ndarray:
    """Uniform minimum spacing (s_max - s_min) / (4 (K + 1)) for every gap."""
    if K < 0:
        raise ConfigError("K must be >= 0")
    return np.full(K + 1, (s_max - s_min) / (4.0 * (K + 1)))


@dataclass(frozen=True)
class ExperimentConfiguration:
    """Ordered internal cut points between fixed exposure bounds.

    Strict ordering s_min < s_1 < ... < s_K < s_max is enforced here; the
    minimum-gap requirement (every gap larger than its entry in
    ``min_gaps``) is a soft constraint evaluated by the configuration prior
    and by the move proposals, so that out-of-support configurations are
    representable and score log-density -inf rather than being
    unconstructible.
    """

    s: np.ndarray
    s_min: float
    s_max: float
    min_gaps: np.ndarray

    def __post_init__(self):
        s = _as_float_array(self.s, "s", 1)
        full = np.concatenate(([self.s_min], s, [self.s_max]))
        if not np.all(np.diff(full) > 0):
            raise ConfigError(
                f"cut points must satisfy {self.s_min} < s_1 < ... < s_K < {self.s_max}, got {s}"
            )
        gaps = _as_float_array(self.min_gaps, "min_gaps", 1)
        if len(gaps) != len(s) + 1:
            raise ConfigError(
                f"min_gaps needs {len(s) + 1} entries for K={len(s)}, got {len(gaps)}"
            )
        if np.any(gaps < 0):
            raise ConfigError("min_gaps must be nonnegative")
        s.setflags(write=False)
        gaps.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "min_gaps", gaps)
        object.__setattr__(self, "s_min", float(self.s_min))
        object.__setattr__(self, "s_max", float(self.s_max))

    @property
    def K(self) -> int:
        return len(self.s)

    def full(self) -> np.ndarray:
        """All K+2 boundaries including s_min and s_max."""
        return np.concatenate(([self.s_min], self.s, [self.s_max]))

    def gaps(self) -> np.ndarray:
        return np.diff(self.full())

    def satisfies_gaps(self) -> bool:
        return bool(np.all(self.gaps() > self.min_gaps))


@dataclass(frozen=True)
class ExperimentParams:
    """Per-experiment regression parameters.

    ``alpha_x``/``alpha_y`` are 0/1 inclusion indicators; an excluded
    covariate must carry a coefficient of exactly zero.
    """

    alpha_x: np.ndarray
    alpha_y: np.ndarray
    delta_x0: float
    delta_x: np.ndarray
    delta_y0: float
    beta: float
    delta_y: np.ndarray
    sigma2_x: float
    sigma2_y: float

    def __post_init__(self):
        ax = np.asarray(self.alpha_x, dtype=np.int8)
        ay = np.asarray(self.alpha_y, dtype=np.int8)
        dx = _as_float_array(self.delta_x, "delta_x", 1)
        dy = _as_float_array(self.delta_y, "delta_y", 1)
        p = len(ax)
        if not (len(ay) == len(dx) == len(dy) == p):
            raise ConfigError("alpha_x, alpha_y, delta_x, delta_y must share length p")
        for arr, label in ((ax, "alpha_x"), (ay, "alpha_y")):
            if arr.size and not np.all((arr == 0) | (arr == 1)):
                raise ConsistencyError(f"{label} entries must be 0 or 1")
        if np.any(dx[ax == 0] != 0.0):
            j = int(np.flatnonzero((ax == 0) & (dx != 0.0))[0])
            raise ConsistencyError(f"delta_x[{j}] nonzero while alpha_x[{j}] = 0")
        if np.any(dy[ay == 0] != 0.0):
            j = int(np.flatnonzero((ay == 0) & (dy != 0.0))[0])
            raise ConsistencyError(f"delta_y[{j}] nonzero while alpha_y[{j}] = 0")
        if not (self.sigma2_x > 0 and self.sigma2_y > 0):
            raise ConsistencyError("residual variances must be positive")
        for arr in (ax, ay, dx, dy):
            arr.setflags(write=False)
        object.__setattr__(self, "alpha_x", ax)
        object.__setattr__(self, "alpha_y", ay)
        object.__setattr__(self, "delta_x", dx)
        object.__setattr__(self, "delta_y", dy)
        for name in ("delta_x0", "delta_y0", "beta", "sigma2_x", "sigma2_y"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def p(self) -> int:
        return len(self.alpha_x)


RECURSION_TOL = 1e-8


@dataclass(frozen=True)
class ChainState:
    """Complete parameter vector at one MCMC iteration."""

    config: ExperimentConfiguration
    experiments: Tuple[ExperimentParams, ...]

    def __post_init__(self):
        exps = tuple(self.experiments)
        if len(exps) != self.config.K + 1:
            raise ConfigError(
                f"need {self.config.K + 1} experiments for K={self.config.K}, got {len(exps)}"
            )
        object.__setattr__(self, "experiments", exps)
        resid = self.recursion_residual()
        if resid > RECURSION_TOL:
            raise ConsistencyError(
                f"outcome intercepts violate the continuity recursion by {resid:.3e}"
            )

    @property
    def delta10(self) -> float:
        return self.experiments[0].delta_y0

    def recursion_residual(self) -> float:
        """Largest absolute deviation from the intercept recursion."""
        full = self.config.full()
        worst = 0.0
        for k in range(1, len(self.experiments)):
            prev = self.experiments[k - 1]
            expected = prev.delta_y0 + prev.beta * (full[k] - full[k - 1])
            worst = max(worst, abs(self.experiments[k].delta_y0 - expected))
        return worst

    def betas(self) -> np.ndarray:
        return np.array([e.beta for e in self.experiments])

    def intercepts(self) -> np.ndarray:
        return np.array([e.delta_y0 for e in self.experiments])


@dataclass(frozen=True)
class Hyperparameters:
    """Prior and proposal constants shared by all experiments.

    ``omega`` is the prior odds of outcome-model inclusion given
    exposure-model inclusion; ``omega0`` the same odds when the covariate is
    absent from the exposure model.  ``alpha_x_marginal`` is the marginal
    prior inclusion probability for the exposure model.  ``sigma_tune`` is
    the standard deviation of the slope perturbation used by the jump-over
    move; when None it is resolved at run time to
    0.25 * sd(y) / (s_max - s_min).
    """

    mu0: float = 0.0
    sigma0: float = 100.0
    a0: float = 0.001
    b0: float = 0.001
    omega: float = 1000.0
    omega0: float = 1.0
    alpha_x_marginal: float = 0.5
    move_probs: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    sigma_tune: Optional[float] = None
    combine_include_probs: Tuple[float, float, float] = (0.01, 0.5, 0.99)
    split_include_probs: Tuple[float, float] = (0.2, 0.95)
    within_include_probs: Tuple[float, float, float] = (0.05, 0.5, 0.95)

    def __post_init__(self):
        if not (self.sigma0 > 0 and self.a0 > 0 and self.b0 > 0):
            raise ConfigError("sigma0, a0, b0 must be positive")
        if self.omega < 1:
            raise ConfigError("omega must be >= 1")
        if self.omega0 <= 0:
            raise ConfigError("omega0 must be positive")
        if not 0 < self.alpha_x_marginal <= 1:
            raise ConfigError("alpha_x_marginal must lie in (0, 1]")
        mp = tuple(float(v) for v in self.move_probs)
        if len(mp) != 3 or any(v < 0 for v in mp) or abs(sum(mp) - 1.0) > 1e-12:
            raise ConfigError("move_probs must be three nonnegative values summing to 1")
        object.__setattr__(self, "move_probs", mp)
        if self.sigma_tune is not None and not self.sigma_tune > 0:
            raise ConfigError("sigma_tune must be positive")
        for name in ("combine_include_probs", "split_include_probs", "within_include_probs"):
            probs = tuple(float(v) for v in getattr(self, name))
            if any(not 0 < v < 1 for v in probs):
                raise ConfigError(f"{name} entries must lie strictly in (0, 1)")
            object.__setattr__(self, name, probs)

    def resolve_sigma_tune(self, y: np.ndarray, s_min: float, s_max: float) -> float:
        if self.sigma_tune is not None:
            return self.sigma_tune
        return 0.25 * float(np.std(y)) / (s_max - s_min)


def locate_experiment(x: float, config: ExperimentConfiguration) -> int:
    """Experiment number (1-based, in 1..K+1) containing exposure x.

    Intervals are closed on the left; x == s_max belongs to the last
    experiment.
    """
    if not (config.s_min <= x <= config.s_max):
        raise DataError(
            f"exposure {x} outside bounds [{config.s_min}, {config.s_max}]"
        )
    full = config.full()
    k = int(np.searchsorted(full, x, side="right")) - 1
    return min(k, config.K) + 1


def intercept_recursion(delta_y0_1: float, betas, config: ExperimentConfiguration) -> np.ndarray:
    """Outcome intercepts of all K+1 experiments from the first one.

    delta_y0[k] = delta_y0[k-1] + beta[k-1] * (s_k - s_{k-1}); the returned
    first entry equals the input.
    """
    betas = np.asarray(betas, dtype=np.float64)
    if len(betas) < config.K:
        raise ConfigError(f"need at least {config.K} slopes, got {len(betas)}")
    gaps = config.gaps()
    out = np.empty(config.K + 1)
    out[0] = delta_y0_1
    for k in range(1, config.K + 1):
        out[k] = out[k - 1] + betas[k - 1] * gaps[k - 1]
    return out


def eval_er(x: float, state: ChainState, data: Dataset) -> float:
    """Mean response at exposure x under centered covariates.

    Equals the closed form delta_y0[k] + beta_k (x - s_{k-1}); with centered
    covariates this is identical to averaging the per-unit predictions over
    the dataset.
    """
    if data.p and not data.centered:
        raise DataError("eval_er requires centered covariates")
    k = locate_experiment(x, state.config) - 1
    exp = state.experiments[k]
    left = state.config.full()[k]
    return exp.delta_y0 + exp.beta * (x - left)


def instantaneous_effect(x: float, state: ChainState) -> float:
    """Slope of the mean response at exposure x (piecewise constant)."""
    k = locate_experiment(x, state.config) - 1
    return state.experiments[k].beta


def shift_effect(x: float, delta: float, state: ChainState, data: Dataset) -> float:
    """Change in mean response for an exposure shift from x to x + delta."""
    return eval_er(x + delta, state, data) - eval_er(x, state, data)


def center_covariates(data: Dataset) -> Dataset:
    """Subtract column means from every covariate; records the means.

    Already-centered datasets are returned unchanged.
    """
    if data.centered:
        return data
    if data.p == 0:
        return Dataset(data.y, data.x, data.covariates, data.names,
                       centered=True, covariate_means=np.empty(0))
    means = data.covariates.mean(axis=0)
    centered = data.covariates - means
    # exact re-centering guard against accumulated rounding
    centered -= centered.mean(axis=0)
    return Dataset(data.y, data.x, centered, data.names,
                   centered=True, covariate_means=means)
