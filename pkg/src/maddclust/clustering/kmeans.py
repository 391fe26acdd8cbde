"""k-means on a MADD matrix (objective Phi*) and the Euclidean Lloyd baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dissimilarity import DissimilarityMatrix, as_data_matrix
from .assignment import ClusterAssignment, _labels_of, onehot


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    n_init: int = 10
    max_iter: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_init < 1:
            raise ValueError(f"n_init must be >= 1, got {self.n_init}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def _config(config) -> KMeansConfig:
    return config if isinstance(config, KMeansConfig) else KMeansConfig(int(config))


def restart_rng(seed, restart: int) -> np.random.Generator:
    """Independent stream per restart, derived from (seed, restart index)."""
    return np.random.default_rng([int(seed), int(restart)])


def _objective_sq(sq, labels, k):
    """sum_r (2|C_r|)^{-1} sum_{z,w in C_r} sq[z, w]."""
    total = 0.0
    for j in range(1, k + 1):
        idx = np.flatnonzero(labels == j)
        if idx.size:
            total += sq[np.ix_(idx, idx)].sum() / (2.0 * idx.size)
    return float(total)


def objective_phi_star(D, assignment) -> float:
    """Phi*: within-cluster sum of squared dissimilarities, each cluster scaled by 1/(2|C|)."""
    values = D.values if isinstance(D, DissimilarityMatrix) else np.asarray(D, dtype=np.float64)
    labels = _labels_of(assignment)
    if values.shape != (labels.size, labels.size):
        raise ValueError(f"matrix of shape {values.shape} does not match {labels.size} labels")
    k = int(labels.max()) if labels.size else 0
    return _objective_sq(values**2, labels, k)


def _seed_labels(sq, k, rng):
    """Squared-dissimilarity-proportional seeding, then nearest-seed assignment."""
    n = sq.shape[0]
    centers = [int(rng.integers(n))]
    closest = sq[centers[0]].copy()
    for _ in range(1, k):
        weights = closest.copy()
        weights[centers] = 0.0
        total = weights.sum()
        if total > 0:
            c = int(rng.choice(n, p=weights / total))
        else:
            c = int(rng.choice(np.setdiff1d(np.arange(n), centers)))
        centers.append(c)
        closest = np.minimum(closest, sq[c])
    labels = np.argmin(sq[:, centers], axis=1) + 1
    labels[centers] = np.arange(1, k + 1)
    return labels


def _repair_empty(labels, score, k):
    """Move the worst-fitting point (largest score to its own cluster) into each empty cluster."""
    repairs = 0
    for j in range(1, k + 1):
        if np.any(labels == j):
            continue
        sizes = np.bincount(labels, minlength=k + 1)
        own = score[np.arange(labels.size), labels - 1].copy()
        own[sizes[labels] < 2] = -np.inf
        x = int(np.argmax(own))
        labels[x] = j
        repairs += 1
    return repairs


def _madd_restart(sq, k, max_iter, rng):
    labels = _seed_labels(sq, k, rng)
    phi = _objective_sq(sq, labels, k)
    trace = [phi]
    repairs = 0
    for _ in range(max_iter):
        sizes = np.bincount(labels, minlength=k + 1)[1:]
        score = (sq @ onehot(labels, k)) / sizes
        new = np.argmin(score, axis=1) + 1
        repairs += _repair_empty(new, score, k)
        if np.array_equal(new, labels):
            break
        new_phi = _objective_sq(sq, new, k)
        if new_phi >= phi:
            # the batch rule is not a descent step for non-Euclidean rho^2; stop at the last improvement
            break
        labels, phi = new, new_phi
        trace.append(phi)
    labels, phi = _single_moves(sq, labels, k, phi, trace)
    return labels, phi, trace, repairs


def _single_moves(sq, labels, k, phi, trace):
    """Exact one-point transfers while any transfer lowers Phi*."""
    n = labels.size
    labels = labels.copy()
    H = sq @ onehot(labels, k)  # H[x, r] = sum_{z in C_r} sq[x, z]
    S = np.array([H[labels == r + 1, r].sum() for r in range(k)])
    size = np.bincount(labels, minlength=k + 1)[1:].astype(float)
    tol = 1e-12 * max(phi, 1.0)
    for _ in range(100 * n):
        moved = False
        for x in range(n):
            a = labels[x] - 1
            if size[a] < 2:
                continue
            loss_a = S[a] / (2 * size[a]) - (S[a] - 2 * H[x, a]) / (2 * (size[a] - 1))
            gain = (S + 2 * H[x]) / (2 * (size + 1)) - S / (2 * size)
            gain[a] = np.inf
            b = int(np.argmin(gain))
            delta = gain[b] - loss_a
            if delta < -tol:
                S[a] -= 2 * H[x, a]
                S[b] += 2 * H[x, b]
                size[a] -= 1
                size[b] += 1
                H[:, a] -= sq[:, x]
                H[:, b] += sq[:, x]
                labels[x] = b + 1
                phi += delta
                moved = True
        if not moved:
            break
        phi = _objective_sq(sq, labels, k)
        trace.append(phi)
    return labels, phi


def kmeans_madd(D, config) -> ClusterAssignment:
    """Minimise Phi* over k-partitions of a MADD (or any dissimilarity) matrix.

    Each restart seeds on rho^2, iterates full-pass reassignment to the cluster
    with the smallest mean rho^2 until labels settle (or Phi* stops dropping),
    then applies improving single-point transfers. The best restart by Phi* wins;
    ties keep the earliest restart.
    """
    config = _config(config)
    values = D.values if isinstance(D, DissimilarityMatrix) else DissimilarityMatrix(D).values
    n = values.shape[0]
    k = config.k
    if k > n:
        raise ValueError(f"k={k} exceeds the number of observations n={n}")
    sq = values**2
    if k == 1:
        labels = np.ones(n, dtype=np.int64)
        phi = _objective_sq(sq, labels, 1)
        return ClusterAssignment(labels, 1, phi, {"traces": [[phi]], "repairs": 0})
    best = None
    traces = []
    repairs = 0
    for r in range(config.n_init):
        labels, phi, trace, rep = _madd_restart(sq, k, config.max_iter, restart_rng(config.seed, r))
        traces.append(trace)
        repairs += rep
        if best is None or phi < best[1]:
            best = (labels, phi)
    out = ClusterAssignment.from_labels(best[0], objective=best[1],
                                        info={"traces": traces, "repairs": repairs})
    return out


def _sqdist(X, C):
    d2 = (X**2).sum(1)[:, None] - 2 * X @ C.T + (C**2).sum(1)[None, :]
    return np.maximum(d2, 0.0)


def _euclid_restart(X, k, max_iter, rng):
    n = X.shape[0]
    centers = [int(rng.integers(n))]
    closest = ((X - X[centers[0]]) ** 2).sum(1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            c = int(rng.choice(n, p=closest / total))
        else:
            c = int(rng.choice(np.setdiff1d(np.arange(n), centers)))
        centers.append(c)
        closest = np.minimum(closest, ((X - X[c]) ** 2).sum(1))
    C = X[centers].copy()
    labels = None
    trace = []
    repairs = 0
    for _ in range(max_iter):
        d2 = _sqdist(X, C)
        new = np.argmin(d2, axis=1) + 1
        repairs += _repair_empty(new, d2, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        C = np.stack([X[labels == j].mean(0) for j in range(1, k + 1)])
        trace.append(float(((X - C[labels - 1]) ** 2).sum()))
    phi = float(((X - C[labels - 1]) ** 2).sum())
    return labels, phi, trace, repairs


def kmeans_euclid(X, config) -> ClusterAssignment:
    """Lloyd's algorithm with mean centroids; best of n_init restarts by the within sum of squares."""
    config = _config(config)
    X = as_data_matrix(X)
    n = X.shape[0]
    k = config.k
    if k > n:
        raise ValueError(f"k={k} exceeds the number of observations n={n}")
    best = None
    traces = []
    repairs = 0
    for r in range(config.n_init):
        labels, phi, trace, rep = _euclid_restart(X, k, config.max_iter, restart_rng(config.seed, r))
        traces.append(trace)
        repairs += rep
        if best is None or phi < best[1]:
            best = (labels, phi)
    return ClusterAssignment.from_labels(best[0], objective=best[1],
                                         info={"traces": traces, "repairs": repairs})
