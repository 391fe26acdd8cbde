"""Agglomerative clustering on a precomputed dissimilarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dissimilarity import DissimilarityMatrix
from .assignment import ClusterAssignment

LINKAGES = ("average", "single", "complete")


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Merge history. Leaves are 1..n; the node created by merge s is n + s (s = 1..n-1)."""

    left: np.ndarray
    right: np.ndarray
    height: np.ndarray
    n: int
    linkage: str = "average"

    def __post_init__(self):
        if not (len(self.left) == len(self.right) == len(self.height) == self.n - 1):
            raise ValueError(f"a dendrogram over {self.n} leaves needs exactly {self.n - 1} merges")
        used = np.concatenate([self.left, self.right])
        if np.unique(used).size != used.size:
            raise ValueError("a dendrogram node was merged more than once")
        if np.any(np.asarray(self.height) < 0):
            raise ValueError("merge heights must be non-negative")

    @property
    def merges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(h)) for a, b, h in zip(self.left, self.right, self.height)]


def _matrix(D) -> np.ndarray:
    if isinstance(D, DissimilarityMatrix):
        return D.values
    return DissimilarityMatrix(D).values


def agglomerate(D, linkage: str = "average") -> Dendrogram:
    """Greedy agglomeration with exact Lance-Williams updates.

    Ties go to the lexicographically smallest pair of active slots, where a
    merged group keeps the smaller of its two slots.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    dist = np.array(_matrix(D), dtype=np.float64)
    n = dist.shape[0]
    if n < 2:
        raise ValueError("agglomeration needs at least two observations")
    np.fill_diagonal(dist, np.inf)
    node = np.arange(1, n + 1)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    height = np.empty(n - 1)

    for s in range(n - 1):
        flat = int(np.argmin(dist))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        left[s], right[s] = sorted((node[i], node[j]))
        height[s] = dist[i, j]

        if linkage == "average":
            new = (size[i] * dist[i] + size[j] * dist[j]) / (size[i] + size[j])
        elif linkage == "single":
            new = np.minimum(dist[i], dist[j])
        else:
            new = np.maximum(dist[i], dist[j])
        new[~active] = np.inf
        dist[i, :] = new
        dist[:, i] = new
        dist[i, i] = np.inf
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        active[j] = False
        size[i] += size[j]
        node[i] = n + s + 1

    return Dendrogram(left, right, height, n, linkage)


def cut(dendrogram: Dendrogram, k: int) -> ClusterAssignment:
    """Partition left after undoing the last k - 1 merges."""
    n = dendrogram.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    parent = np.arange(2 * n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(n - k):
        new = n + s + 1
        parent[find(dendrogram.left[s])] = new
        parent[find(dendrogram.right[s])] = new
    roots = [find(leaf) for leaf in range(1, n + 1)]
    return ClusterAssignment.from_labels(roots, info={"linkage": dendrogram.linkage})


def cut_all(dendrogram: Dendrogram, ks) -> dict[int, ClusterAssignment]:
    return {k: cut(dendrogram, k) for k in ks}


def hierarchical(D, k: int, linkage: str = "average") -> ClusterAssignment:
    return cut(agglomerate(D, linkage), k)
