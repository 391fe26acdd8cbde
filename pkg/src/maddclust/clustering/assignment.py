from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Labels 1..k for n observations; every cluster is non-empty.

    ``info`` carries algorithm diagnostics (objective traces, repairs, sigma).
    """

    labels: np.ndarray
    k: int
    objective: float | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if labels.size and (labels.min() < 1 or labels.max() > self.k):
            raise ValueError(f"labels must lie in 1..{self.k}")
        if np.unique(labels).size != self.k:
            raise ValueError(f"assignment has empty clusters (k={self.k})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels, objective=None, info=None) -> "ClusterAssignment":
        """Relabel arbitrary labels to 1..k in order of first appearance."""
        labels = np.asarray(labels).ravel()
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first))
        canon = order[inverse] + 1
        return cls(canon, int(first.size), objective, dict(info or {}))

    @property
    def n(self) -> int:
        return self.labels.size

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.labels == j)

    def groups(self) -> list[np.ndarray]:
        return [self.members(j) for j in range(1, self.k + 1)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k + 1)[1:]


def _labels_of(a) -> np.ndarray:
    if isinstance(a, ClusterAssignment):
        return a.labels
    return np.asarray(a).ravel()


def onehot(labels, k) -> np.ndarray:
    """n x k indicator matrix for 1-based labels."""
    labels = np.asarray(labels)
    m = np.zeros((labels.size, k))
    m[np.arange(labels.size), labels - 1] = 1.0
    return m
