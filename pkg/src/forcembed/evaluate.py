"""Label-prediction protocol over learned embeddings.

Random (non-stratified) train/test splits at several ratios, a one-vs-rest
logistic regression trained by full-batch gradient descent, and micro/macro
F1 on the held-out nodes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .graph import LabelMap

PROTOCOL_RATIOS = (0.4, 0.5, 0.6, 0.7, 0.8)


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float
    repeat_count: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError(f"train_ratio must be in (0, 1), got {self.train_ratio}")
        if self.repeat_count < 1:
            raise ValueError("repeat_count must be >= 1")


def make_split(labeled_nodes: Sequence[int], spec: SplitSpec,
               repeat_index: int) -> tuple[list[int], list[int]]:
    """Uniform random partition of *labeled_nodes*, seeded by ``(seed, repeat_index)``."""
    nodes = np.asarray(sorted(labeled_nodes), dtype=np.int64)
    if len(nodes) < 2:
        raise ValueError("need at least 2 labeled nodes to split")
    n_train = int(round(spec.train_ratio * len(nodes)))
    if n_train < 1 or n_train > len(nodes) - 1:
        raise ValueError(f"ratio {spec.train_ratio} leaves an empty side for {len(nodes)} nodes")
    rng = np.random.default_rng([spec.seed, repeat_index])
    perm = rng.permutation(len(nodes))
    return sorted(nodes[perm[:n_train]].tolist()), sorted(nodes[perm[n_train:]].tolist())


def _sigmoid(z):
    # split by sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class OneVsRestLogistic:
    """One-vs-rest logistic regression, one weight vector per class.

    Features are standardized with the training mean and standard deviation.
    No intercept is fitted, so an all-zero input scores every class equally
    and :meth:`predict` falls back to the lowest class index.
    """

    epochs: int = 300
    step_size: float = 0.1
    l2: float = 1e-4
    classes: tuple = field(default=(), init=False)
    mean: np.ndarray | None = field(default=None, init=False)
    scale: np.ndarray | None = field(default=None, init=False)
    weights: np.ndarray | None = field(default=None, init=False)

    def fit(self, X, y) -> "OneVsRestLogistic":
        X = np.asarray(X, dtype=np.float64)
        y = list(y)
        if X.ndim != 2 or X.shape[0] != len(y):
            raise ValueError("X must be 2-D with one row per label")
        self.classes = tuple(sorted(set(y)))
        if len(self.classes) < 2:
            raise ValueError("training labels contain a single class")
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale = np.where(std > 0, std, 1.0)
        Z = (X - self.mean) / self.scale

        cls_index = {c: i for i, c in enumerate(self.classes)}
        Y = np.zeros((len(y), len(self.classes)))
        Y[np.arange(len(y)), [cls_index[c] for c in y]] = 1.0

        W = np.zeros((Z.shape[1], len(self.classes)))
        m = Z.shape[0]
        for _ in range(self.epochs):
            grad = Z.T @ (_sigmoid(Z @ W) - Y) / m + self.l2 * W
            W -= self.step_size * grad
        self.weights = W
        return self

    def decision_function(self, X) -> np.ndarray:
        if self.weights is None:
            raise RuntimeError("classifier is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.weights.shape[0]:
            raise ValueError(f"expected {self.weights.shape[0]} features, got shape {X.shape}")
        return ((X - self.mean) / self.scale) @ self.weights

    def predict(self, X) -> list:
        # argmax returns the first maximum, i.e. the lowest class index on ties
        idx = np.argmax(self.decision_function(X), axis=1)
        return [self.classes[i] for i in idx]


def fit_classifier(X, y, **kwargs) -> OneVsRestLogistic:
    return OneVsRestLogistic(**kwargs).fit(X, y)


def predict(clf: OneVsRestLogistic, X) -> list:
    return clf.predict(X)


def _check_pair(true, pred):
    if len(true) != len(pred):
        raise ValueError(f"length mismatch: {len(true)} vs {len(pred)}")
    if len(true) == 0:
        raise ValueError("empty label lists")


def micro_f1(true, pred) -> float:
    """F1 over globally pooled TP/FP/FN.

    With one label per node every miss is one FP and one FN, so this equals
    accuracy.
    """
    _check_pair(true, pred)
    tp = sum(1 for t, p in zip(true, pred) if t == p)
    miss = len(true) - tp
    return 2 * tp / (2 * tp + 2 * miss)


def macro_f1(true, pred) -> float:
    """Unweighted mean of per-class F1 over the classes present in *true*."""
    _check_pair(true, pred)
    scores = []
    for c in sorted(set(true)):
        tp = sum(1 for t, p in zip(true, pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(true, pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(true, pred) if t == c and p != c)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return math.fsum(scores) / len(scores)


@dataclass(frozen=True)
class EvalRow:
    ratio: float
    repeat: int
    micro_f1: float
    macro_f1: float


@dataclass
class EvalReport:
    rows: list[EvalRow]

    def means(self) -> dict[float, tuple[float, float]]:
        """Per-ratio ``(micro, macro)`` arithmetic means over repeats."""
        out = {}
        for ratio in sorted({r.ratio for r in self.rows}):
            sel = sorted((r for r in self.rows if r.ratio == ratio), key=lambda r: r.repeat)
            out[ratio] = (math.fsum(r.micro_f1 for r in sel) / len(sel),
                          math.fsum(r.macro_f1 for r in sel) / len(sel))
        return out

    def write_csv(self, stream: IO[str], dataset: str = "") -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["dataset", "ratio", "repeat", "micro_f1", "macro_f1"])
        for r in sorted(self.rows, key=lambda r: (r.ratio, r.repeat)):
            writer.writerow([dataset, r.ratio, r.repeat, f"{r.micro_f1:.6f}", f"{r.macro_f1:.6f}"])
        for ratio, (mi, ma) in self.means().items():
            writer.writerow([dataset, ratio, "mean", f"{mi:.6f}", f"{ma:.6f}"])


def run_protocol(labels: LabelMap, U: np.ndarray, ratios=PROTOCOL_RATIOS,
                 repeat_count: int = 5, seed: int = 0, repeats=None) -> EvalReport:
    """Split, fit, predict and score for every ``ratio x repeat``.

    *repeats* optionally gives the order in which repeat indices are run;
    each repeat is seeded on its own, so the order has no effect on scores.
    """
    nodes = labels.nodes
    if not nodes:
        raise ValueError("no labeled nodes")
    if max(nodes) >= U.shape[0]:
        raise ValueError("label refers to a node outside the embedding")
    repeats = list(range(repeat_count)) if repeats is None else list(repeats)
    rows = []
    for ratio in ratios:
        spec = SplitSpec(ratio, repeat_count, seed)
        for rep in repeats:
            train_nodes, test_nodes = make_split(nodes, spec, rep)
            clf = fit_classifier(U[train_nodes], [labels.labels[k] for k in train_nodes])
            pred = clf.predict(U[test_nodes])
            true = [labels.labels[k] for k in test_nodes]
            rows.append(EvalRow(ratio, rep, micro_f1(true, pred), macro_f1(true, pred)))
    return EvalReport(rows)
