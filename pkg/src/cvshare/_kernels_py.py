"""Pure numpy fallback for the sampling and accumulation kernels.

Mirrors ``cvshare._kernels``: both backends consume standard-normal
draws in the same order (C-ordered rows of an (n, d) block), so a fixed
seed gives the same outcomes up to floating-point summation order. Each
backend on its own is exactly reproducible.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def standard_normal_matrix(gen: np.random.Generator, n_rows: int, n_cols: int) -> np.ndarray:
    """Draw an (n_rows, n_cols) matrix of standard normals."""
    return gen.standard_normal((n_rows, n_cols))


def mvn_sample(
    gen: np.random.Generator, mean: np.ndarray, chol: np.ndarray, n_shots: int
) -> np.ndarray:
    """Sample n_shots rows from N(mean, chol @ chol.T).

    :param mean: length-d mean vector.
    :param chol: d x d lower-triangular Cholesky factor of the covariance.
    """
    z = gen.standard_normal((n_shots, mean.shape[0]))
    return mean[None, :] + z @ chol.T


def linear_mse_batches(
    outcomes: np.ndarray, weights: np.ndarray, truths: np.ndarray, n_batches: int
) -> np.ndarray:
    """Per-batch mean squared error of a linear estimator.

    Rows of ``outcomes`` are grouped into n_batches equal consecutive
    batches; returns, per batch, mean((outcomes @ weights - truths)^2).
    """
    err = outcomes @ weights - truths
    return np.mean(err.reshape(n_batches, -1) ** 2, axis=1)
