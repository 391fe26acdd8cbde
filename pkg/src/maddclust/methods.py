"""Named clustering methods: one algorithm paired with one dissimilarity.

A method string looks like ``avgl:rho0`` or ``km:euclid``. The dissimilarity
part decides both what the algorithm clusters on and which dissimilarity the
cluster-count statistics use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import (
    ClusterAssignment,
    KMeansConfig,
    SpectralConfig,
    agglomerate,
    cut,
    kmeans_euclid,
    kmeans_madd,
    spectral,
)
from .dissimilarity import PRESETS, DissimilarityMatrix, base_distance_matrix, euclidean_matrix, madd_matrix

ALGORITHMS = {"avgl": "average", "single": "single", "complete": "complete", "km": None, "spectral": None}
DISSIMILARITIES = ("euclid", "rho0", "rho1", "rho2")


@dataclass(frozen=True)
class Method:
    algorithm: str
    dissimilarity: str = "rho0"
    n_init: int = 10
    sigma: float | str = "median"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        if self.dissimilarity not in DISSIMILARITIES:
            raise ValueError(f"unknown dissimilarity {self.dissimilarity!r}; choose from {DISSIMILARITIES}")

    @classmethod
    def parse(cls, text: str) -> "Method":
        """``avgl:rho0``; the legacy ``km-euclid`` spelling is accepted too."""
        if isinstance(text, Method):
            return text
        text = text.strip()
        if text == "km-euclid":
            return cls("km", "euclid")
        algo, _, diss = text.partition(":")
        return cls(algo, diss or "rho0")

    @property
    def name(self) -> str:
        return f"{self.algorithm}:{self.dissimilarity}"

    @property
    def is_madd(self) -> bool:
        return self.dissimilarity != "euclid"

    @property
    def hierarchical(self) -> bool:
        return ALGORITHMS[self.algorithm] is not None

    @property
    def spec(self):
        return PRESETS.get(self.dissimilarity)

    def base(self, X) -> DissimilarityMatrix:
        """phi for MADD methods, plain Euclidean distances otherwise."""
        if self.is_madd:
            return base_distance_matrix(X, self.spec)
        return euclidean_matrix(X)

    def matrix(self, X) -> DissimilarityMatrix:
        """The dissimilarity the algorithm and the statistics work on."""
        base = self.base(X)
        return madd_matrix(base) if self.is_madd else base

    def fit(self, X, k: int, seed: int = 0, D: DissimilarityMatrix | None = None):
        return self.fit_many(X, [k], seed, D)[k]

    def fit_many(self, X, ks, seed: int = 0, D: DissimilarityMatrix | None = None):
        """Assignments for every k in ``ks``; hierarchical methods share one dendrogram."""
        if D is None:
            D = self.matrix(X)
        n = D.n
        ks = [int(k) for k in ks if 1 <= k <= n]
        out = {}
        if self.hierarchical:
            tree = agglomerate(D, ALGORITHMS[self.algorithm])
            return {k: cut(tree, k) for k in ks}
        for k in ks:
            if self.algorithm == "km":
                cfg = KMeansConfig(k, n_init=self.n_init, seed=seed)
                out[k] = kmeans_madd(D, cfg) if self.is_madd else kmeans_euclid(X, cfg)
            elif k == 1:
                out[k] = ClusterAssignment(np.ones(n, dtype=np.int64), 1)
            else:
                out[k] = spectral(D, SpectralConfig(k, self.sigma, self.n_init, seed=seed))
        return out
