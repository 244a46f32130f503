"""Backend selection for the whole-matrix force kernel.

The compiled Cython kernel is used when it was built; otherwise the NumPy
fallback is imported. Set ``FORCEMBED_BACKEND=python`` to force the
fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .forces import ForceParams
from .graph import Graph

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

AVAILABLE = ("cython", "python") if _kernels_c is not None else ("python",)

_requested = os.environ.get("FORCEMBED_BACKEND", "").strip().lower()
if _requested and _requested not in ("cython", "python"):
    raise ImportError(f"unknown FORCEMBED_BACKEND {_requested!r}")
if _requested == "cython" and _kernels_c is None:
    raise ImportError("FORCEMBED_BACKEND=cython but the extension is not built")
BACKEND = _requested or AVAILABLE[0]


def _impl(backend: str | None):
    backend = backend or BACKEND
    if backend == "cython":
        if _kernels_c is None:
            raise ValueError("cython backend is not available")
        return _kernels_c.node_forces
    if backend == "python":
        return _kernels_py.node_forces
    raise ValueError(f"unknown backend {backend!r}")


@dataclass
class ForceBuffers:
    """Per-step outputs: attraction, repulsion and per-node energy."""

    attractive: np.ndarray
    repulsive: np.ndarray
    energy: np.ndarray

    @classmethod
    def empty(cls, node_count: int, dim: int) -> "ForceBuffers":
        return cls(np.zeros((node_count, dim)), np.zeros((node_count, dim)),
                   np.zeros(node_count))

    @property
    def net(self) -> np.ndarray:
        return self.attractive + self.repulsive


def compute_block(g: Graph, U: np.ndarray, params: ForceParams, start: int, stop: int,
                  out: ForceBuffers, backend: str | None = None) -> None:
    """Fill rows ``start:stop`` of *out* from the snapshot *U*."""
    _impl(backend)(U, g.indptr, g.indices, g.weights,
                   params.p, params.q, params.b, params.repulsive_weight,
                   start, stop, out.attractive, out.repulsive, out.energy)


def partition(node_count: int, parts: int) -> list[tuple[int, int]]:
    """Split ``range(node_count)`` into at most *parts* contiguous ranges."""
    parts = max(1, min(parts, node_count))
    bounds = np.linspace(0, node_count, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def compute_forces(g: Graph, U: np.ndarray, params: ForceParams, pool=None,
                   workers: int = 1, backend: str | None = None) -> ForceBuffers:
    """Forces on every node against the frozen snapshot *U*.

    Rows are split into contiguous ranges, one per worker. Each row is
    computed independently with a fixed summation order, so the result does
    not depend on *workers*.
    """
    U = np.ascontiguousarray(U, dtype=np.float64)
    out = ForceBuffers.empty(*U.shape)
    ranges = partition(g.node_count, workers)
    if pool is None or len(ranges) == 1:
        for start, stop in ranges:
            compute_block(g, U, params, start, stop, out, backend)
    else:
        futures = [pool.submit(compute_block, g, U, params, a, b, out, backend)
                   for a, b in ranges]
        for f in futures:
            f.result()
    return out
