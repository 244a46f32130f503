"""Undirected weighted graphs with dense node indexing.

Nodes are re-indexed to ``0..|V|-1`` in order of first appearance and the
adjacency is held in CSR form (``indptr``, ``indices``, ``weights``) with
each neighbor list sorted by index.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or label input."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class Graph:
    """Immutable undirected graph in CSR form.

    Parameters
    ----------
    ids : sequence of str
        Original node identifiers; position is the dense index.
    indptr, indices, weights : array_like
        CSR adjacency. Must already be symmetric with sorted rows.
    """

    def __init__(self, ids: Sequence[str], indptr, indices, weights):
        self.ids = tuple(str(i) for i in ids)
        self.index = {name: k for k, name in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise ValueError("node identifiers must be unique")
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        for arr in (self.indptr, self.indices, self.weights):
            arr.setflags(write=False)
        if len(self.indptr) != len(self.ids) + 1:
            raise ValueError("indptr length must be node_count + 1")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int, float]],
                   ids: Sequence[str] | None = None) -> "Graph":
        """Build a graph from ``(i, j, w)`` triples over dense indices.

        Self-loops are dropped and duplicate edges have their weights summed.
        """
        if ids is None:
            ids = [str(k) for k in range(node_count)]
        if len(ids) != node_count:
            raise ValueError("ids length must equal node_count")
        adj: list[dict[int, float]] = [dict() for _ in range(node_count)]
        for i, j, w in edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise ValueError(f"edge ({i}, {j}) out of range")
            if not w > 0:
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            if i == j:
                logger.warning("dropping self-loop on node %s", ids[i])
                continue
            adj[i][j] = adj[i].get(j, 0.0) + w
            adj[j][i] = adj[j].get(i, 0.0) + w
        return cls._from_adjacency(ids, adj)

    @classmethod
    def _from_adjacency(cls, ids, adj: list[dict[int, float]]) -> "Graph":
        indptr = np.zeros(len(adj) + 1, dtype=np.int64)
        indices, weights = [], []
        for k, row in enumerate(adj):
            for j in sorted(row):
                indices.append(j)
                weights.append(row[j])
            indptr[k + 1] = len(indices)
        return cls(ids, indptr, indices, weights)

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def undirected(self) -> bool:
        return True

    def degree(self, k: int) -> int:
        return int(self.indptr[k + 1] - self.indptr[k])

    def edges(self):
        """Yield each undirected edge once as ``(i, j, w)`` with ``i < j``."""
        for i in range(self.node_count):
            for pos in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[pos])
                if i < j:
                    yield i, j, float(self.weights[pos])

    def binarized(self) -> "Graph":
        return Graph(self.ids, self.indptr, self.indices, np.ones_like(self.weights))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.ids == other.ids
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self):
        return f"Graph(|V|={self.node_count}, |E|={self.edge_count})"


def neighbors(g: Graph, k: int) -> list[tuple[int, float]]:
    """Return ``(neighbor, weight)`` pairs of node *k*, sorted by index."""
    if not 0 <= k < g.node_count:
        raise IndexError(f"node index {k} out of range for |V|={g.node_count}")
    lo, hi = g.indptr[k], g.indptr[k + 1]
    return [(int(j), float(w)) for j, w in zip(g.indices[lo:hi], g.weights[lo:hi])]


def _content_lines(stream: IO[str]):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def parse_edge_list(stream: IO[str], weighted: bool = True) -> Graph:
    """Parse a whitespace-separated edge list into a symmetric :class:`Graph`.

    Each content line is ``src dst`` or ``src dst weight``; ``#`` starts a
    comment line. With ``weighted=False`` the merged weights are binarized
    to 1.0.
    """
    index: dict[str, int] = {}
    ids: list[str] = []
    edges: list[tuple[int, int, float]] = []

    def intern(name: str) -> int:
        k = index.get(name)
        if k is None:
            k = index[name] = len(ids)
            ids.append(name)
        return k

    for lineno, tokens in _content_lines(stream):
        if len(tokens) not in (2, 3):
            raise GraphFormatError(f"expected 2 or 3 tokens, got {len(tokens)}", lineno)
        w = 1.0
        if len(tokens) == 3:
            try:
                w = float(tokens[2])
            except ValueError:
                raise GraphFormatError(f"invalid weight {tokens[2]!r}", lineno) from None
            if not (w > 0 and np.isfinite(w)):
                raise GraphFormatError(f"non-positive weight {tokens[2]}", lineno)
        i, j = intern(tokens[0]), intern(tokens[1])
        if i == j:
            logger.warning("line %d: dropping self-loop on node %s", lineno, tokens[0])
            continue
        edges.append((i, j, w))

    if not ids:
        raise GraphFormatError("empty graph: no edges found")
    g = Graph.from_edges(len(ids), edges, ids)
    return g if weighted else g.binarized()


def write_edge_list(g: Graph, stream: IO[str]) -> None:
    """Serialize *g* so that :func:`parse_edge_list` rebuilds it exactly.

    Lines are ordered so that first-appearance indexing on re-parse gives
    every node its current index. A node with no lower-indexed neighbor and
    no edge to its successor is written as a self-loop, which the parser
    drops after registering the node.
    """
    ids = g.ids
    written: set[tuple[int, int]] = set()
    for k in range(g.node_count):
        lower = [(j, w) for j, w in neighbors(g, k) if j < k]
        if not lower:
            nxt = [w for j, w in neighbors(g, k) if j == k + 1]
            if nxt:
                stream.write(f"{ids[k]} {ids[k + 1]} {nxt[0]!r}\n")
                written.add((k, k + 1))
            else:
                stream.write(f"{ids[k]} {ids[k]}\n")
        for j, w in lower:
            if (j, k) not in written:
                stream.write(f"{ids[j]} {ids[k]} {w!r}\n")


def write_node_map(g: Graph, stream: IO[str]) -> None:
    """Write the ``dense_index original_id`` sidecar."""
    for k, name in enumerate(g.ids):
        stream.write(f"{k} {name}\n")


@dataclass(frozen=True)
class LabelMap:
    """Single label per node, keyed by dense index."""

    labels: dict[int, str]
    vocabulary: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.vocabulary:
            object.__setattr__(self, "vocabulary", tuple(sorted(set(self.labels.values()))))

    @property
    def nodes(self) -> list[int]:
        return sorted(self.labels)

    @property
    def class_count(self) -> int:
        return len(self.vocabulary)

    def __len__(self):
        return len(self.labels)


def parse_labels(stream: IO[str], g: Graph) -> LabelMap:
    """Parse ``node_id label`` lines against the identifier table of *g*."""
    labels: dict[int, str] = {}
    for lineno, tokens in _content_lines(stream):
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 2 tokens, got {len(tokens)}", lineno)
        name, label = tokens
        k = g.index.get(name)
        if k is None:
            raise GraphFormatError(f"unknown node id {name!r}", lineno)
        prev = labels.get(k)
        if prev is not None and prev != label:
            raise GraphFormatError(
                f"conflicting labels for node {name!r}: {prev!r} vs {label!r}", lineno)
        labels[k] = label
    return LabelMap(labels)


def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbor lattice; node ``(r, c)`` has index ``r * cols + c`` and id ``"r,c"``."""
    if rows < 1 or cols < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {rows}x{cols}")
    ids = [f"{r},{c}" for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                edges.append((k, k + 1, 1.0))
            if r + 1 < rows:
                edges.append((k, k + cols, 1.0))
    return Graph.from_edges(rows * cols, edges, ids)


def random_graph(node_count: int, edge_count: int, seed: int = 0) -> Graph:
    """Uniform random simple graph with exactly *edge_count* edges, G(n, m)."""
    max_edges = node_count * (node_count - 1) // 2
    if edge_count > max_edges:
        raise ValueError(f"at most {max_edges} edges possible on {node_count} nodes")
    rng = np.random.default_rng(seed)
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < edge_count:
        i, j = rng.integers(0, node_count, size=2)
        if i != j:
            chosen.add((min(i, j), max(i, j)))
    return Graph.from_edges(node_count, [(i, j, 1.0) for i, j in sorted(chosen)])


def planted_partition(sizes: Sequence[int], p_in: float, p_out: float,
                      seed: int = 0) -> tuple[Graph, LabelMap]:
    """Stochastic block model with labelled communities.

    Useful as a stand-in for citation datasets when none is on disk.
    """
    rng = np.random.default_rng(seed)
    block = np.repeat(np.arange(len(sizes)), sizes)
    n = len(block)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(block[iu] == block[ju], p_in, p_out)
    keep = rng.random(len(iu)) < prob
    g = Graph.from_edges(n, zip(iu[keep], ju[keep], np.ones(keep.sum())))
    return g, LabelMap({k: f"c{block[k]}" for k in range(n)})
