"""Deterministic 2-D PCA projection of embedding rows."""
from __future__ import annotations

import warnings

import numpy as np

RANK_TOL = 1e-12


class DegenerateProjectionWarning(UserWarning):
    pass


def pca_components(X: np.ndarray, k: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Top-*k* principal axes of *X* and their variances.

    Axes come from ``eigh`` of the covariance, ordered by decreasing
    eigenvalue, and each is signed so its largest-magnitude loading is
    positive. Axes whose variance is negligible are returned as zero
    vectors with a warning.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D array")
    Y = X - X.mean(axis=0)
    cov = Y.T @ Y / max(X.shape[0] - 1, 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    axes = np.zeros((X.shape[1], k))
    var = np.zeros(k)
    scale = max(float(vals[0]) if len(vals) else 0.0, 0.0)
    for c in range(min(k, X.shape[1])):
        if vals[c] <= RANK_TOL * max(scale, 1.0):
            continue
        v = vecs[:, c]
        # first index of the largest magnitude decides the sign
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        axes[:, c] = v
        var[c] = vals[c]
    missing = int(np.sum(var == 0))
    if missing:
        warnings.warn(f"covariance rank below {k}; {missing} projected component(s) set to zero",
                      DegenerateProjectionWarning, stacklevel=2)
    return axes, var


def pca_project(X: np.ndarray, k: int = 2) -> np.ndarray:
    """Centered coordinates of *X* on its top-*k* principal axes."""
    X = np.asarray(X, dtype=np.float64)
    axes, _ = pca_components(X, k)
    return (X - X.mean(axis=0)) @ axes
