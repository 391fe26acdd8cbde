"""Estimating the number of clusters: KL, Gap, Jump, CV instability, Dunn and penalized Dunn.

Every statistic is computed from a dissimilarity matrix, so the same code gives
the Euclidean versions (plain distances) and the MADD versions (rho in place of
the Euclidean norm). All argmax/argmin ties resolve to the smallest k.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .clustering.assignment import _labels_of
from .dissimilarity import DissimilarityMatrix, as_data_matrix, madd_cross, madd_matrix
from .evaluation import rand_index
from .methods import Method

DEFAULT_K_MAX = 12


@dataclass
class EstimatorReport:
    method: str
    ks: list
    statistic: list
    k_hat: int
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "ks": list(self.ks),
            "statistic": [_jsonable(v) for v in self.statistic],
            "k_hat": int(self.k_hat),
            "diagnostics": {k: _jsonable(v) for k, v in self.diagnostics.items()},
        }


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass(frozen=True)
class PenaltySpec:
    """zeta(d) = lam * ln(d)."""

    lam: float = 0.015

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"penalty weight must be positive, got {self.lam}")

    def zeta(self, d: int) -> float:
        if d < 2:
            raise ValueError(f"the penalty needs d >= 2, got {d}")
        return self.lam * math.log(d)


def _argmax_smallest(ks, values):
    """argmax with ties (and +inf ties) resolved to the smallest k; NaNs never win."""
    vals = np.asarray(values, dtype=np.float64)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    return int(ks[int(np.argmax(vals))])


def _values(D):
    if isinstance(D, DissimilarityMatrix):
        return D.values
    return np.asarray(D, dtype=np.float64)


# ---------------------------------------------------------------------------
# dispersion and the k sweep


def within_dispersion(D, assignment) -> float:
    """W_k = sum_j (2|C_j|)^{-1} sum_{z,w in C_j} D(z, w)^2."""
    values = _values(D)
    labels = _labels_of(assignment)
    if values.shape != (labels.size, labels.size):
        raise ValueError(f"matrix of shape {values.shape} does not match {labels.size} labels")
    total = 0.0
    for j in np.unique(labels):
        idx = np.flatnonzero(labels == j)
        total += (values[np.ix_(idx, idx)] ** 2).sum() / (2.0 * idx.size)
    return float(total)


@dataclass
class KSweep:
    """Assignments for k = 1..K(+1) from one base method, with their dispersions."""

    D: DissimilarityMatrix
    assignments: dict
    method: str = ""
    d: int | None = None

    def __post_init__(self):
        self.W = {k: within_dispersion(self.D, a) for k, a in sorted(self.assignments.items())}
        self._dunn = {}

    @property
    def ks(self) -> list:
        return sorted(self.assignments)

    def dunn_parts(self, k):
        if k not in self._dunn:
            self._dunn[k] = dunn_parts(self.D, self.assignments[k])
        return self._dunn[k]


def build_sweep(X, method, k_max: int = DEFAULT_K_MAX + 1, seed: int = 0, D=None) -> KSweep:
    """Fit ``method`` for k = 1..k_max (capped at n). KL needs one k past the range."""
    method = Method.parse(method)
    X = as_data_matrix(X)
    if D is None:
        D = method.matrix(X)
    assignments = method.fit_many(X, range(1, min(k_max, D.n) + 1), seed=seed, D=D)
    return KSweep(D, assignments, method.name, X.shape[1])


# ---------------------------------------------------------------------------
# KL


def kl_statistic(W: dict, d: int, k_max: int | None = None):
    """KL(k) = |Diff(k) / Diff(k+1)| with Diff(k) = (k-1)^{2/d} W_{k-1} - k^{2/d} W_k, k = 2..K."""
    top = max(W) - 1 if k_max is None else min(k_max, max(W) - 1)
    ks = list(range(2, top + 1))

    def diff(k):
        return (k - 1) ** (2.0 / d) * W[k - 1] - k ** (2.0 / d) * W[k]

    stats, flagged = [], []
    for k in ks:
        num, den = diff(k), diff(k + 1)
        if den == 0:
            stats.append(math.inf)
            flagged.append(k)
        else:
            stats.append(abs(num / den))
    return ks, stats, flagged


def kl_select(sweep: KSweep, d: int | None = None, k_max: int = DEFAULT_K_MAX) -> EstimatorReport:
    d = d or sweep.d
    ks, stats, flagged = kl_statistic(sweep.W, d, k_max)
    if not ks:
        raise ValueError("KL needs W_k for k = 1..3 at least")
    diag = {"zero_denominator": flagged} if flagged else {}
    return EstimatorReport("KL", ks, stats, _argmax_smallest(ks, stats), diag)


# ---------------------------------------------------------------------------
# Jump


def jump_statistic(W: dict, t: float, mode: str, d: int, k_max: int | None = None):
    """Jump(k) = dhat_k^{-t} - dhat_{k-1}^{-t}, dhat_0^{-t} = 0.

    dhat_k = W_k / d for the Euclidean version and W_k for the MADD version.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if mode not in ("euclid", "madd"):
        raise ValueError(f"mode must be 'euclid' or 'madd', got {mode!r}")
    top = max(W) if k_max is None else min(k_max, max(W))
    ks = list(range(1, top + 1))
    inv = [0.0]
    for k in ks:
        dk = W[k] / d if mode == "euclid" else W[k]
        inv.append(math.inf if dk == 0 else dk ** (-t))
    stats, flagged = [], []
    for i in range(1, len(inv)):
        if math.isinf(inv[i]) and math.isinf(inv[i - 1]):
            stats.append(0.0)
            flagged.append(ks[i - 1])
        else:
            stats.append(inv[i] - inv[i - 1])
            if math.isinf(inv[i]):
                flagged.append(ks[i - 1])
    return ks, stats, flagged


def jump_select(sweep: KSweep, t: float, mode: str, d: int | None = None,
                k_max: int = DEFAULT_K_MAX) -> EstimatorReport:
    d = d or sweep.d
    if 1 not in sweep.W:
        raise ValueError("the Jump statistic needs the sweep to start at k = 1")
    ks, stats, flagged = jump_statistic(sweep.W, t, mode, d, k_max)
    k_hat = _argmax_smallest(ks, stats)
    diag = {"t": t, "mode": mode}
    if flagged:
        diag["zero_distortion"] = flagged
    if k_hat == ks[-1]:
        diag["boundary"] = True
    return EstimatorReport("Jump", ks, stats, k_hat, diag)


# ---------------------------------------------------------------------------
# Dunn and penalized Dunn


def dunn_parts(D, assignment):
    """(B, W, singletons): min mean between-cluster and max mean within-cluster dissimilarity.

    A singleton's within value is taken as 0. B is NaN when k = 1.
    """
    values = _values(D)
    labels = _labels_of(assignment)
    groups = [np.flatnonzero(labels == j) for j in np.unique(labels)]
    within, singletons = [], 0
    for g in groups:
        if g.size < 2:
            within.append(0.0)
            singletons += 1
        else:
            within.append(values[np.ix_(g, g)].sum() / (g.size * (g.size - 1)))
    between = math.inf
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            between = min(between, values[np.ix_(groups[a], groups[b])].mean())
    if len(groups) < 2:
        between = math.nan
    return float(between), float(max(within)), singletons


def dunn_index(D, assignment) -> float:
    """D(k) = B / W; +inf when every cluster has zero spread."""
    labels = _labels_of(assignment)
    if np.unique(labels).size < 2:
        raise ValueError("the Dunn index needs at least two clusters")
    b, w, _ = dunn_parts(D, assignment)
    return math.inf if w == 0 else b / w


def dunn_select(sweep: KSweep, k_max: int = DEFAULT_K_MAX) -> EstimatorReport:
    ks = [k for k in sweep.ks if 2 <= k <= k_max]
    if not ks:
        raise ValueError("the Dunn index needs a sweep covering k >= 2")
    stats, flags = [], {}
    for k in ks:
        b, w, singles = sweep.dunn_parts(k)
        stats.append(math.inf if w == 0 else b / w)
        if singles:
            flags[k] = singles
    diag = {"singleton_clusters": flags} if flags else {}
    if any(math.isinf(s) for s in stats):
        diag["zero_within"] = [k for k, s in zip(ks, stats) if math.isinf(s)]
    return EstimatorReport("Dunn", ks, stats, _argmax_smallest(ks, stats), diag)


def pd_select(sweep: KSweep, penalty: PenaltySpec | None = None, d: int | None = None,
              k_max: int = DEFAULT_K_MAX) -> EstimatorReport:
    """PD(k) = B_k / W_k - k zeta(d) over k = 1..K, with B_1 defined as B_2."""
    penalty = penalty or PenaltySpec()
    d = d or sweep.d
    zeta = penalty.zeta(d)
    ks = [k for k in sweep.ks if 1 <= k <= k_max]
    if ks[:2] != [1, 2]:
        raise ValueError("penalized Dunn needs a sweep covering k = 1 and k = 2")
    b2 = sweep.dunn_parts(2)[0]
    stats, flags = [], {}
    for k in ks:
        b, w, singles = sweep.dunn_parts(k)
        if k == 1:
            b = b2
        stats.append((math.inf if w == 0 else b / w) - k * zeta)
        if singles:
            flags[k] = singles
    diag = {"zeta": zeta, "lambda": penalty.lam, "B1": b2}
    if flags:
        diag["singleton_clusters"] = flags
    return EstimatorReport("PD", ks, stats, _argmax_smallest(ks, stats), diag)


# ---------------------------------------------------------------------------
# Gap


def gap_rule(gap, s, ks=None):
    """Smallest k with Gap(k) >= Gap(k+1) - s_{k+1}; None when no k qualifies."""
    ks = list(range(1, len(gap) + 1)) if ks is None else list(ks)
    for i in range(len(ks) - 1):
        if gap[i] >= gap[i + 1] - s[i + 1]:
            return ks[i]
    return None


def _log_dispersions(X, method, ks, seed):
    sweep = build_sweep(X, method, max(ks), seed)
    W = np.array([sweep.W[k] for k in ks])
    if np.any(W <= 0):
        bad = [k for k, w in zip(ks, W) if w <= 0]
        raise ValueError(f"degenerate dispersion: W_k = 0 for k = {bad}")
    return np.log(W)


def gap_select(X, method, k_max: int = DEFAULT_K_MAX, B: int = 100, seed=0) -> EstimatorReport:
    """Gap statistic with feature-wise uniform reference samples over the observed ranges.

    For MADD methods the whole MADD matrix is recomputed on every reference sample.
    """
    method = Method.parse(method)
    X = as_data_matrix(X)
    if B < 2:
        raise ValueError("the Gap statistic needs B >= 2 reference samples")
    n = X.shape[0]
    ks = list(range(1, min(k_max, n) + 1))
    base_seq = np.random.SeedSequence(seed)
    logW = _log_dispersions(X, method, ks, seed=int(base_seq.generate_state(1)[0]))
    lo, hi = X.min(axis=0), X.max(axis=0)
    ref = np.empty((B, len(ks)))
    for b, child in enumerate(base_seq.spawn(B)):
        rng = np.random.default_rng(child)
        Xb = lo + (hi - lo) * rng.uniform(size=X.shape)
        ref[b] = _log_dispersions(Xb, method, ks, seed=int(child.generate_state(1)[0]))
    gap = ref.mean(axis=0) - logW
    sd = ref.std(axis=0)
    s = np.sqrt(1.0 + 1.0 / B) * sd
    k_hat = gap_rule(gap, s, ks)
    diag = {"s": s.tolist(), "sd": sd.tolist(), "B": B}
    if k_hat is None:
        k_hat = ks[-1]
        diag["no_k_satisfied_rule"] = True
    return EstimatorReport("Gap", ks, gap.tolist(), k_hat, diag)


# ---------------------------------------------------------------------------
# cross-validated instability


def cv_split_size(n: int) -> int:
    """Largest multiple of 5 not exceeding n / 3."""
    return 5 * (n // 15)


def _extend(method, X_train, D_train, base_train, assignment, X_new):
    """Label new points by the smallest mean squared dissimilarity to each fitted cluster."""
    labels = assignment.labels
    k = assignment.k
    if method.is_madd:
        diss = madd_cross(X_train, base_train, X_new, method.spec)
        score = np.stack([(diss[:, labels == j] ** 2).mean(1) for j in range(1, k + 1)], axis=1)
    elif method.algorithm == "km":
        centers = np.stack([X_train[labels == j].mean(0) for j in range(1, k + 1)])
        score = ((X_new[:, None, :] - centers[None]) ** 2).sum(-1)
    else:
        sq = ((X_new[:, None, :] - X_train[None]) ** 2).sum(-1)
        score = np.stack([sq[:, labels == j].mean(1) for j in range(1, k + 1)], axis=1)
    return np.argmin(score, axis=1) + 1


def instability(labels1, labels2) -> float:
    """Fraction of pairs on which the two labelings disagree about co-membership."""
    return rand_index(labels1, labels2)


def _cv_repetition(X, method, ks, m, rng, seed):
    n = X.shape[0]
    perm = rng.permutation(n)
    parts = perm[:m], perm[m:2 * m], perm[2 * m:]
    X3 = X[parts[2]]
    predictions = []
    for part in parts[:2]:
        Xp = X[part]
        base = method.base(Xp)
        D = madd_matrix(base) if method.is_madd else base
        fits = method.fit_many(Xp, ks, seed=seed, D=D)
        predictions.append({k: _extend(method, Xp, D, base, fits[k], X3) for k in ks})
    return [instability(predictions[0][k], predictions[1][k]) for k in ks]


def cv_select(X, method, k_max: int = DEFAULT_K_MAX, B: int = 100, seed=0):
    """CV_a (minimise mean instability) and CV_v (mode of per-repetition minimisers)."""
    method = Method.parse(method)
    X = as_data_matrix(X)
    n = X.shape[0]
    if n < 15:
        raise ValueError(f"cross-validated instability needs n >= 15, got {n}")
    m = cv_split_size(n)
    ks = list(range(2, min(k_max, m) + 1))
    seq = np.random.SeedSequence(seed)
    ins = np.empty((B, len(ks)))
    for b, child in enumerate(seq.spawn(B)):
        rng = np.random.default_rng(child)
        ins[b] = _cv_repetition(X, method, ks, m, rng, int(child.generate_state(1)[0]))
    mean = ins.mean(axis=0)
    k_a = ks[int(np.argmin(mean))]
    minimisers = [ks[int(np.argmin(row))] for row in ins]
    counts = Counter(minimisers)
    top = max(counts.values())
    k_v = min(k for k, c in counts.items() if c == top)
    diag = {"m": m, "B": B}
    cv_a = EstimatorReport("CV_a", ks, mean.tolist(), k_a, dict(diag))
    cv_v = EstimatorReport("CV_v", ks, mean.tolist(), k_v,
                           dict(diag, minimisers=minimisers, votes={int(k): c for k, c in sorted(counts.items())}))
    return cv_a, cv_v


ESTIMATORS = ("dunn", "pd", "kl", "jump", "gap", "cv")


def estimate_k(X, method, estimators=("dunn", "pd", "kl", "jump"), k_max: int = DEFAULT_K_MAX,
               seed: int = 0, t: float = 1.0, lam: float = 0.015, B: int = 100, sweep: KSweep | None = None):
    """Run the requested estimators; returns {name: EstimatorReport}."""
    method = Method.parse(method)
    X = as_data_matrix(X)
    d = X.shape[1]
    unknown = set(estimators) - set(ESTIMATORS)
    if unknown:
        raise ValueError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")
    out = {}
    if any(e in estimators for e in ("dunn", "pd", "kl", "jump")):
        sweep = sweep or build_sweep(X, method, k_max + 1, seed)
    if "dunn" in estimators:
        out["dunn"] = dunn_select(sweep, k_max)
    if "pd" in estimators:
        out["pd"] = pd_select(sweep, PenaltySpec(lam), d, k_max)
    if "kl" in estimators:
        out["kl"] = kl_select(sweep, d, k_max)
    if "jump" in estimators:
        out["jump"] = jump_select(sweep, t, "madd" if method.is_madd else "euclid", d, k_max)
    if "gap" in estimators:
        out["gap"] = gap_select(X, method, k_max, B, seed)
    if "cv" in estimators:
        out["cv_a"], out["cv_v"] = cv_select(X, method, k_max, B, seed)
    return out
