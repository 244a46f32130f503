"""Attractive and repulsive force terms of the spring-electrical model.

Everything here is pure and works on single vectors or single nodes. The
whole-matrix kernels used during training live in :mod:`forcembed.kernels`
and are checked against these functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class ForceParams:
    """Scalars of the force model.

    Attributes
    ----------
    p : float
        Attraction rate.
    q : float
        Repulsion rate.
    b : float
        Distance bias added to every absolute coordinate difference.
    repulsive_weight : float
        Uniform pair weight on the repulsive term.
    """

    p: float = 1.0
    q: float = 5.0
    b: float = 0.01
    repulsive_weight: float = 1.0

    def __post_init__(self):
        for name in ("p", "q", "b", "repulsive_weight"):
            value = getattr(self, name)
            if not (value > 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")


def _pair(u_i, u_j):
    u_i = np.asarray(u_i, dtype=np.float64)
    u_j = np.asarray(u_j, dtype=np.float64)
    if u_i.shape != u_j.shape or u_i.ndim != 1:
        raise ValueError(f"dimension mismatch: {u_i.shape} vs {u_j.shape}")
    return u_i, u_j


def attractive_pair(u_i, u_j, w: float, p: float) -> np.ndarray:
    """Spring pull on node *i* from neighbor *j*: ``-p * w * (u_i - u_j)``."""
    u_i, u_j = _pair(u_i, u_j)
    return -p * w * (u_i - u_j)


def biased_sq_distance(u_i, u_j, b: float) -> float:
    """``sum_m (|u_i[m] - u_j[m]| + b) ** 2``; never below ``n * b**2``."""
    u_i, u_j = _pair(u_i, u_j)
    total = 0.0
    for d in (u_i - u_j).tolist():
        t = abs(d) + b
        total += t * t
    return total


def repulsive_pair(u_i, u_j, w_rep: float, q: float, b: float) -> np.ndarray:
    """Charge push on node *i* from node *j*.

    ``q * w_rep * (u_i - u_j) / biased_sq_distance(u_i, u_j, b)``. The bias
    keeps the denominator positive, so coincident nodes give a zero vector
    rather than a singularity.
    """
    u_i, u_j = _pair(u_i, u_j)
    return q * w_rep * (u_i - u_j) / biased_sq_distance(u_i, u_j, b)


def _check_node(g: Graph, U: np.ndarray, k: int):
    if not 0 <= k < g.node_count:
        raise IndexError(f"node index {k} out of range for |V|={g.node_count}")
    if U.shape[0] != g.node_count:
        raise ValueError(f"embedding has {U.shape[0]} rows, graph has {g.node_count} nodes")


def node_attractive(g: Graph, U: np.ndarray, k: int, params: ForceParams) -> np.ndarray:
    """Total spring force on node *k*, summed over neighbors in index order."""
    _check_node(g, U, k)
    total = np.zeros(U.shape[1])
    for pos in range(g.indptr[k], g.indptr[k + 1]):
        total += attractive_pair(U[k], U[g.indices[pos]], g.weights[pos], params.p)
    return total


def node_repulsive(g: Graph, U: np.ndarray, k: int, params: ForceParams) -> np.ndarray:
    """Total repulsion on node *k* from every other node, neighbors included."""
    _check_node(g, U, k)
    total = np.zeros(U.shape[1])
    for i in range(g.node_count):
        if i != k:
            total += repulsive_pair(U[k], U[i], params.repulsive_weight, params.q, params.b)
    return total


def node_energy(fa, fr) -> float:
    """Squared norm of the net force on one node."""
    fa, fr = _pair(fa, fr)
    net = fa + fr
    return float(net @ net)
