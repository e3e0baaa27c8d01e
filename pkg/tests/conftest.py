import numpy as np
import pytest

from lerca.model import (
    ChainState,
    Dataset,
    ExperimentConfiguration,
    ExperimentParams,
    Hyperparameters,
    center_covariates,
    default_min_gaps,
    intercept_recursion,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_dataset(rng, n=60, p=3, bounds=(0.0, 10.0), centered=True):
    x = rng.uniform(bounds[0], bounds[1], n)
    c = rng.normal(size=(n, p))
    y = 0.3 * x + c @ rng.normal(size=p) + rng.normal(size=n)
    names = tuple(f"C{j + 1}" for j in range(p))
    data = Dataset(y, x, c, names)
    return center_covariates(data) if centered else data


def make_config(K=2, bounds=(0.0, 10.0), cuts=None, min_gaps=None):
    if cuts is None:
        cuts = np.linspace(bounds[0], bounds[1], K + 2)[1:-1]
    if min_gaps is None:
        min_gaps = default_min_gaps(len(np.atleast_1d(cuts)), *bounds)
    return ExperimentConfiguration(np.atleast_1d(cuts), bounds[0], bounds[1], min_gaps)


def make_state(rng, K=2, p=3, bounds=(0.0, 10.0), cuts=None, all_in=False):
    """Random internally-consistent chain state."""
    config = make_config(K, bounds, cuts)
    betas = rng.normal(scale=0.5, size=K + 1)
    icpts = intercept_recursion(rng.normal(), betas, config)
    exps = []
    for k in range(K + 1):
        ax = np.ones(p, dtype=np.int8) if all_in else (rng.random(p) < 0.6).astype(np.int8)
        ay = np.ones(p, dtype=np.int8) if all_in else (rng.random(p) < 0.6).astype(np.int8)
        dx = np.where(ax == 1, rng.normal(size=p), 0.0)
        dy = np.where(ay == 1, rng.normal(size=p), 0.0)
        exps.append(ExperimentParams(
            alpha_x=ax, alpha_y=ay,
            delta_x0=rng.normal(), delta_x=dx,
            delta_y0=icpts[k], beta=betas[k], delta_y=dy,
            sigma2_x=0.5 + rng.random(), sigma2_y=0.5 + rng.random(),
        ))
    return ChainState(config, tuple(exps))


@pytest.fixture
def hyper():
    return Hyperparameters()
