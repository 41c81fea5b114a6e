"""Deterministic sensing matrices: isometry certificates, bounds and reconstruction."""

import json

import numpy as np

from ._core import (
    ConfigError,
    Matrix,
    __version__,
    coherence_mean,
    coherence_threshold,
    column_sum_eta,
    gaussian_tail_S,
    mcdiarmid_bound,
    regularized_gamma_q,
    strip_delta,
)
from . import _core

__all__ = [
    "ConfigError",
    "Matrix",
    "__version__",
    "certify",
    "coherence_mean",
    "coherence_threshold",
    "column_sum_eta",
    "fwht",
    "gaussian_tail_S",
    "matrix",
    "mcdiarmid_bound",
    "measure",
    "reconstruct",
    "regularized_gamma_q",
    "run_experiment",
    "strip_delta",
]


def matrix(family, seed=0, **params):
    """Build a sensing matrix, e.g. ``matrix("dg", m=5, r=0)`` or ``matrix("gaussian", N=32, C=256, seed=1)``."""
    return _core.build_matrix(json.dumps({"family": family, "params": params, "seed": seed}))


def certify(m, mode="exhaustive", tol=1e-9, seed=0, threads=1):
    return json.loads(_core.certify(m, mode, tol, seed, threads))


def fwht(v):
    """Unnormalized Walsh-Hadamard transform of a length-2^n vector."""
    return _core.fwht(np.asarray(v, dtype=np.complex128))


def measure(m, indices, values, noise="none", sigma=0.0, seed=0):
    """Returns (f, noise_norm) for f = N^{-1/2} Phi alpha + nu."""
    return _core.measure(m, list(indices), np.asarray(values, dtype=np.complex128), noise, sigma, seed)


def reconstruct(m, f, k_max, **options):
    return json.loads(_core.reconstruct(m, np.asarray(f, dtype=np.complex128), k_max, json.dumps(options)))


def run_experiment(config):
    """Runs an experiment described by a config dict and returns its record."""
    return json.loads(_core.run_experiment(json.dumps(config)))
