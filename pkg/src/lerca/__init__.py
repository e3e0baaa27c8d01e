"""LERCA: local exposure-response confounding adjustment.

Bayesian MCMC estimation of a causal exposure-response curve that
partitions the exposure range into experiments, selects and adjusts for
confounders locally within each experiment, and infers the partition
itself.  Includes the matching synthetic-data generator, WAIC / potential
scale reduction diagnostics and a command line interface.
"""
from .model import (
    ChainState,
    ConfigError,
    ConsistencyError,
    DataError,
    Dataset,
    ExperimentConfiguration,
    ExperimentParams,
    Hyperparameters,
    LercaError,
    NumericalError,
    center_covariates,
    default_min_gaps,
    eval_er,
    instantaneous_effect,
    intercept_recursion,
    locate_experiment,
    shift_effect,
)

__version__ = "0.1.0"

__all__ = [
    "ChainState",
    "ConfigError",
    "ConsistencyError",
    "DataError",
    "Dataset",
    "ExperimentConfiguration",
    "ExperimentParams",
    "Hyperparameters",
    "LercaError",
    "NumericalError",
    "center_covariates",
    "default_min_gaps",
    "eval_er",
    "instantaneous_effect",
    "intercept_recursion",
    "locate_experiment",
    "shift_effect",
    "__version__",
]
