"""Base distances of the form h(mean_q psi(|x_q - y_q|)) and the MADD dissimilarity.

MADD ("mean absolute difference of distances") compares two observations by how
differently they see the rest of the sample:

    rho(x_i, x_j) = (n - 2)^{-1} sum_{k != i, j} |phi(x_i, x_k) - phi(x_j, x_k)|

Within-population values shrink as the dimension grows while between-population
values stay bounded away from zero, which is what the clustering code relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TransformSpec",
    "RHO0",
    "RHO1",
    "RHO2",
    "PRESETS",
    "DissimilarityMatrix",
    "as_data_matrix",
    "base_distance",
    "base_distance_matrix",
    "madd_matrix",
    "madd_cross",
    "euclidean_matrix",
    "get_spec",
]

BASE_PHI = "base-phi"
MADD_RHO = "madd-rho"

_H = {
    "sqrt": np.sqrt,
    "identity": lambda t: t,
}
_PSI = {
    "square": np.square,
    "identity": lambda t: t,
    "one-minus-exp": lambda t: -np.expm1(-t),
}


@dataclass(frozen=True)
class TransformSpec:
    """The (h, psi) pair selecting one member of the base distance family."""

    h: str
    psi: str
    name: str = "custom"

    def __post_init__(self):
        if self.h not in _H:
            raise ValueError(f"unknown h transform {self.h!r}; choose from {sorted(_H)}")
        if self.psi not in _PSI:
            raise ValueError(f"unknown psi transform {self.psi!r}; choose from {sorted(_PSI)}")

    def apply_h(self, t):
        return _H[self.h](t)

    def apply_psi(self, t):
        return _PSI[self.psi](t)


RHO0 = TransformSpec("sqrt", "square", "rho0")
RHO1 = TransformSpec("identity", "identity", "rho1")
RHO2 = TransformSpec("identity", "one-minus-exp", "rho2")
PRESETS = {s.name: s for s in (RHO0, RHO1, RHO2)}


def get_spec(spec) -> TransformSpec:
    """Accept a TransformSpec or a preset name."""
    if isinstance(spec, TransformSpec):
        return spec
    try:
        return PRESETS[spec]
    except KeyError:
        raise ValueError(f"unknown dissimilarity preset {spec!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    """Symmetric n x n matrix with zero diagonal; ``kind`` is base-phi or madd-rho."""

    values: np.ndarray
    kind: str = BASE_PHI
    spec: TransformSpec | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"dissimilarity matrix must be square, got shape {v.shape}")
        if self.kind not in (BASE_PHI, MADD_RHO):
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        if not np.all(np.isfinite(v)):
            raise ValueError("dissimilarity matrix contains non-finite entries")
        if np.any(np.diag(v) != 0):
            raise ValueError("dissimilarity matrix must have a zero diagonal")
        if np.any(v < 0):
            raise ValueError("dissimilarity matrix has negative entries")
        if not np.allclose(v, v.T, rtol=1e-12, atol=1e-12):
            raise ValueError("dissimilarity matrix is not symmetric")
        v = (v + v.T) / 2
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def scaled(self, c: float) -> "DissimilarityMatrix":
        return DissimilarityMatrix(self.values * c, self.kind, self.spec)

    def subset(self, idx) -> "DissimilarityMatrix":
        idx = np.asarray(idx)
        return DissimilarityMatrix(self.values[np.ix_(idx, idx)], self.kind, self.spec)


def as_data_matrix(X, min_n: int = 1) -> np.ndarray:
    """Validate and return an (n, d) float64 array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"data must be 2-dimensional (n x d), got ndim={X.ndim}")
    n, d = X.shape
    if d < 1:
        raise ValueError("data must have at least one feature")
    if n < min_n:
        raise ValueError(f"need at least {min_n} observations, got {n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("data contains non-finite values")
    return X


def _check_vector(x, name):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < 1:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


def base_distance(x, y, spec=RHO0) -> float:
    """phi_{h,psi}(x, y) = h(d^{-1} sum_q psi(|x_q - y_q|))."""
    spec = get_spec(spec)
    x = _check_vector(x, "x")
    y = _check_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return float(spec.apply_h(np.mean(spec.apply_psi(np.abs(x - y)))))


def _phi_rows(A, B, spec):
    """phi between every row of A and every row of B, shape (len(A), len(B)).

    The coordinate mean runs along the contiguous axis so numpy applies
    pairwise summation.
    """
    out = np.empty((A.shape[0], B.shape[0]))
    for i, a in enumerate(A):
        out[i] = np.mean(spec.apply_psi(np.abs(B - a)), axis=1)
    return spec.apply_h(out)


def base_distance_matrix(X, spec=RHO0) -> DissimilarityMatrix:
    """All pairwise base distances of the rows of X."""
    spec = get_spec(spec)
    X = as_data_matrix(X)
    phi = _phi_rows(X, X, spec)
    # exact symmetry regardless of rounding in the two directions
    phi = np.triu(phi, 1)
    phi = phi + phi.T
    return DissimilarityMatrix(phi, BASE_PHI, spec)


def euclidean_matrix(X) -> DissimilarityMatrix:
    """Plain Euclidean distances (rho0's base scaled by sqrt(d))."""
    X = as_data_matrix(X)
    base = base_distance_matrix(X, RHO0)
    return DissimilarityMatrix(base.values * np.sqrt(X.shape[1]), BASE_PHI, None)


def _as_base(base):
    if isinstance(base, DissimilarityMatrix):
        if base.kind != BASE_PHI:
            raise ValueError(f"MADD needs a base-phi matrix, got kind={base.kind!r}")
        return base
    return DissimilarityMatrix(base, BASE_PHI)


def madd_matrix(base) -> DissimilarityMatrix:
    """MADD values from a matrix of base distances.

    The k = i and k = j terms of the full sum over k are both phi(i, j), so the
    restricted sum is the full L1 distance between rows i and j minus 2 phi(i, j).
    """
    base = _as_base(base)
    phi = base.values
    n = phi.shape[0]
    if n < 3:
        raise ValueError(f"MADD requires at least 3 observations, got {n}")
    rho = np.zeros_like(phi)
    for i in range(n - 1):
        rows = phi[i + 1:]
        # rows j > i; each entry accumulates over k in a fixed order
        full = np.sum(np.abs(rows - phi[i]), axis=1)
        rho[i, i + 1:] = full - 2.0 * phi[i, i + 1:]
    rho = np.maximum(rho, 0.0) / (n - 2)
    rho = rho + rho.T
    return DissimilarityMatrix(rho, MADD_RHO, base.spec)


def madd_cross(train, train_base, query, spec=RHO0) -> np.ndarray:
    """MADD between an external point and each training point.

    The reference set is the training sample without the compared point, so the
    j-th entry averages |phi(query, z) - phi(x_j, z)| over the n - 1 training
    points z != x_j. ``query`` may be a single vector or a matrix of row queries.
    """
    spec = get_spec(spec)
    train = as_data_matrix(train, min_n=2)
    base = _as_base(train_base)
    n, d = train.shape
    if base.n != n:
        raise ValueError(f"train_base is {base.n}x{base.n} but train has {n} rows")
    q = np.asarray(query, dtype=np.float64)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if q.shape[1] != d:
        raise ValueError(f"dimension mismatch: query has {q.shape[1]} features, train has {d}")
    if not np.all(np.isfinite(q)):
        raise ValueError("query contains non-finite values")
    phi_q = _phi_rows(q, train, spec)  # (m, n)
    phi = base.values
    out = np.empty((q.shape[0], n))
    for a in range(q.shape[0]):
        # |phi(q, z) - phi(x_j, z)| summed over all z, minus the z = x_j term phi(q, x_j)
        full = np.sum(np.abs(phi - phi_q[a]), axis=1)
        out[a] = (full - phi_q[a]) / (n - 1)
    out = np.maximum(out, 0.0)
    return out[0] if single else out
