"""Structure-preservation metrics for a trained layout."""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import pdist
from scipy.stats import spearmanr

from .graph import Graph


def hop_distances(g: Graph) -> np.ndarray:
    """All-pairs BFS hop counts; ``inf`` between components."""
    n = g.node_count
    A = csr_matrix((np.ones_like(g.weights), g.indices, g.indptr), shape=(n, n))
    return shortest_path(A, directed=False, unweighted=True)


def adjacency_distance_ratio(g: Graph, U: np.ndarray) -> float:
    """Mean distance over edges divided by mean distance over non-adjacent pairs."""
    n = g.node_count
    iu, ju = np.triu_indices(n, k=1)
    dist = pdist(U)
    A = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), np.diff(g.indptr))
    A[rows, g.indices] = True
    adj = A[iu, ju]
    if not adj.any() or adj.all():
        raise ValueError("need both adjacent and non-adjacent pairs")
    return float(dist[adj].mean() / dist[~adj].mean())


def hop_spearman(g: Graph, U: np.ndarray) -> float:
    """Spearman correlation of hop distance and embedding distance over connected pairs."""
    H = hop_distances(g)
    iu, ju = np.triu_indices(g.node_count, k=1)
    hops = H[iu, ju]
    keep = np.isfinite(hops)
    return float(spearmanr(hops[keep], pdist(U)[keep])[0])
