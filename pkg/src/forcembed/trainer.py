"""Synchronous force-driven training loop.

Each step computes the forces on every node from a frozen snapshot of the
embedding, records the energy (sum of squared net forces), and moves every
node by ``h_t * force`` with the displacement norm clipped to ``delta_max``.
"""
from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .forces import ForceParams
from .graph import Graph
from .kernels import compute_forces

logger = logging.getLogger(__name__)

ENERGY_FLOOR = 1e-12
JITTER = 1e-6


class ConvergenceWarning(UserWarning):
    """Training stopped at ``max_iters`` before the energy settled."""


class NonFiniteForceError(FloatingPointError):
    def __init__(self, node: int, iteration: int):
        super().__init__(f"non-finite force on node {node} at iteration {iteration}")
        self.node = node
        self.iteration = iteration


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    max_iters: int = 500
    energy_rel_tol: float = 1e-4
    patience: int = 10
    h0: float = 0.2
    tau: float = 3000.0
    delta_max: float = 1.0
    schedule: str = "decay"  # or "constant"
    seed: int = 0
    workers: int = 1
    backend: str | None = None
    params: ForceParams = field(default_factory=ForceParams)

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        for name in ("energy_rel_tol", "h0", "tau", "delta_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.schedule not in ("decay", "constant"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def speed(self, t: int) -> float:
        if self.schedule == "constant":
            return self.h0
        return self.h0 / (1.0 + t / self.tau)


@dataclass
class TrainState:
    iteration: int
    U: np.ndarray
    energies: list[float] = field(default_factory=list)
    forces: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.U.shape[1]


def init_embedding(node_count: int, dim: int, seed: int) -> np.ndarray:
    """Uniform ``[-1, 1]`` start positions from a seeded generator.

    Bitwise-identical rows are separated by nudging the later row by
    ``1e-6`` on component ``index mod dim``.
    """
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    U = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(node_count, dim))
    seen: set[bytes] = set()
    for k in range(node_count):
        while U[k].tobytes() in seen:
            U[k, k % dim] += JITTER
        seen.add(U[k].tobytes())
    return U


def _sequential_sum(values: np.ndarray) -> float:
    total = 0.0
    for v in values.tolist():
        total += v
    return total


def total_energy(g: Graph, U: np.ndarray, params: ForceParams, workers: int = 1,
                 backend: str | None = None) -> float:
    """Sum over nodes of the squared net force, in ascending node order."""
    return _sequential_sum(compute_forces(g, U, params, workers=workers, backend=backend).energy)


def step(g: Graph, state: TrainState, cfg: TrainConfig, pool=None) -> TrainState:
    """Advance one synchronous iteration; returns a new state."""
    if state.U.shape != (g.node_count, state.U.shape[1]):
        raise ValueError("embedding shape does not match graph")
    buf = compute_forces(g, state.U, cfg.params, pool=pool, workers=cfg.workers,
                         backend=cfg.backend)
    net = buf.net
    finite = np.isfinite(net).all(axis=1) & np.isfinite(buf.energy)
    if not finite.all():
        raise NonFiniteForceError(int(np.argmin(finite)), state.iteration)

    disp = cfg.speed(state.iteration) * net
    norms = np.sqrt(np.einsum("ij,ij->i", disp, disp))
    over = norms > cfg.delta_max
    if over.any():
        disp[over] *= (cfg.delta_max / norms[over])[:, None]

    return TrainState(
        iteration=state.iteration + 1,
        U=state.U + disp,
        energies=state.energies + [_sequential_sum(buf.energy)],
        forces=net,
    )


def energy_stable(trace, tol: float, patience: int) -> bool:
    """True if the last *patience* relative energy changes are all below *tol*."""
    if len(trace) < patience + 1:
        return False
    tail = trace[-(patience + 1):]
    for prev, cur in zip(tail[:-1], tail[1:]):
        if abs(cur - prev) / max(prev, ENERGY_FLOOR) >= tol:
            return False
    return True


def converged(trace, cfg: TrainConfig) -> bool:
    if len(trace) == 0:
        raise ValueError("energy trace is empty")
    return len(trace) >= cfg.max_iters or energy_stable(trace, cfg.energy_rel_tol, cfg.patience)


def train(g: Graph, cfg: TrainConfig,
          callback: Callable[[TrainState], None] | None = None,
          initial: np.ndarray | None = None) -> tuple[np.ndarray, TrainState]:
    """Run steps from a random start until the energy settles or ``max_iters``.

    *callback* is invoked with the initial state and after every step.
    """
    U0 = init_embedding(g.node_count, cfg.dim, cfg.seed) if initial is None else np.array(initial, dtype=np.float64)
    state = TrainState(iteration=0, U=U0)
    if callback is not None:
        callback(state)

    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        while True:
            state = step(g, state, cfg, pool=pool)
            if callback is not None:
                callback(state)
            if converged(state.energies, cfg):
                break
    finally:
        if pool is not None:
            pool.shutdown()

    if not energy_stable(state.energies, cfg.energy_rel_tol, cfg.patience):
        warnings.warn(
            f"energy not stable after {cfg.max_iters} iterations "
            f"(E={state.energies[-1]:.6g})", ConvergenceWarning, stacklevel=2)
    logger.info("trained %d iterations, final energy %.6g", state.iteration, state.energies[-1])
    return state.U, state


def default_workers() -> int:
    return os.cpu_count() or 1


