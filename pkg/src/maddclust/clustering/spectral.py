"""Normalized-cut spectral clustering on a dissimilarity matrix (RBF similarities)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dissimilarity import DissimilarityMatrix
from .assignment import ClusterAssignment
from .kmeans import KMeansConfig, kmeans_euclid


@dataclass(frozen=True)
class SpectralConfig:
    """``sigma`` is either "median" (the median off-diagonal dissimilarity) or a positive number."""

    k: int
    sigma: float | str = "median"
    n_init: int = 10
    max_iter: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"spectral clustering needs k >= 2, got {self.k}")
        if isinstance(self.sigma, str):
            if self.sigma != "median":
                raise ValueError(f"unknown sigma rule {self.sigma!r}")
        elif not self.sigma > 0:
            raise ValueError(f"fixed sigma must be positive, got {self.sigma}")


def median_sigma(values: np.ndarray) -> float:
    """Median of the off-diagonal entries; falls back to the median positive entry when that is 0."""
    off = values[~np.eye(values.shape[0], dtype=bool)]
    sigma = float(np.median(off))
    if sigma <= 0:
        pos = off[off > 0]
        if pos.size == 0:
            raise ValueError("all dissimilarities are zero; no scale for the RBF kernel")
        sigma = float(np.median(pos))
    return sigma


def rbf_similarity(values: np.ndarray, sigma: float) -> np.ndarray:
    """s_ij = exp(-D_ij^2 / (2 sigma^2)); the diagonal is exp(0) = 1."""
    return np.exp(-(np.asarray(values) ** 2) / (2.0 * sigma**2))


def spectral(D, config) -> ClusterAssignment:
    if not isinstance(config, SpectralConfig):
        config = SpectralConfig(int(config))
    values = D.values if isinstance(D, DissimilarityMatrix) else DissimilarityMatrix(D).values
    n = values.shape[0]
    k = config.k
    if k > n:
        raise ValueError(f"k={k} exceeds the number of observations n={n}")
    sigma = median_sigma(values) if config.sigma == "median" else float(config.sigma)
    W = rbf_similarity(values, sigma)
    np.fill_diagonal(W, 0.0)
    degree = W.sum(axis=1)
    isolated = np.flatnonzero(degree <= 0)
    if isolated.size:
        raise ValueError(
            f"similarity graph has isolated vertices {isolated[:10].tolist()} (sigma={sigma:.4g}); "
            "increase sigma"
        )
    inv_sqrt = 1.0 / np.sqrt(degree)
    L = np.eye(n) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    L = (L + L.T) / 2
    try:
        evals, evecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    U = evecs[:, :k]
    norms = np.linalg.norm(U, axis=1, keepdims=True)
    U = U / np.where(norms > 0, norms, 1.0)
    km = kmeans_euclid(U, KMeansConfig(k, config.n_init, config.max_iter, config.seed))
    info = {"sigma": sigma, "eigenvalues": evals[: k + 1].tolist()}
    return ClusterAssignment(km.labels, k, None, info)
