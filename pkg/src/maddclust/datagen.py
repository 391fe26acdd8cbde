"""Seeded generators for the simulation scenarios and the samplers behind them.

Scenario tags
-------------
A            N(0, 0.5 S) vs N(mu, 2 S); S has 0.98-correlated coordinate pairs, mu = (1, -1, 1, ...)
B            uniform on the shells a sqrt(d) <= |x| <= b sqrt(d), (a, b) = (0, .5), (1, 1.5), (2, 2.5)
Ex1          three Gaussians, AR(1) scatter 0.5^|i-j|, means 0 and +-0.75 on the first half
Ex2          N(alpha, S), N(beta, 4S), N(-alpha, S), N(-beta, 4S)
Ex3          uniform on the ellipsoidal shells i - 1 <= x' S^-1 x <= i - 1/2, i = 1, 2, 3
Ex4          d/2 iid draws from one of three half-annuli in the plane
Ex5          two stationary AR(1) processes with mean 1
Ex6          uniform in the unit ball vs uniform in its largest inscribed cube
Ex7          four zero-mean Gaussians with diagonal variance patterns of 1s and 9s
Ex8          iid N(0, 3) vs iid Student t with 3 degrees of freedom
Ex8-cauchy   iid N(0, 3) vs iid standard Cauchy
null-uniform a single uniform population on [0, 1]^d
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

AR_RHO = 0.5
PAIR_RHO = 0.98
DEFAULT_CLASS_SIZE = 30


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# primitive samplers


def shell_radius(a, b, d, u):
    """Inverse CDF of the radius of a uniform point in the shell a <= r <= b in R^d.

    F(r) = (r^d - a^d) / (b^d - a^d), inverted as r = b (u + (1 - u)(a/b)^d)^(1/d).
    Powers are taken in log space so d in the thousands does not overflow.
    """
    if not 0 <= a < b:
        raise ValueError(f"need 0 <= a < b, got a={a}, b={b}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    u = np.asarray(u, dtype=np.float64)
    with np.errstate(divide="ignore"):
        ratio_d = np.exp(d * np.log(a / b)) if a > 0 else 0.0
        inner = u + (1.0 - u) * ratio_d
        r = b * np.exp(np.log(inner) / d)
    return np.clip(r, a, b)


def shell_second_moment(a, b, d):
    """E[R^2] = d/(d+2) (b^(d+2) - a^(d+2)) / (b^d - a^d) for the shell radius, computed stably."""
    t = a / b
    num = 1.0 - np.exp((d + 2) * np.log(t)) if a > 0 else 1.0
    den = 1.0 - np.exp(d * np.log(t)) if a > 0 else 1.0
    return d / (d + 2.0) * b**2 * num / den


def unit_directions(n, d, rng) -> np.ndarray:
    z = rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def uniform_shell(n, d, a, b, rng, scale=1.0) -> np.ndarray:
    """Uniform points with a*scale <= |x| <= b*scale."""
    r = shell_radius(a, b, d, rng.uniform(size=n))
    return unit_directions(n, d, rng) * (scale * r)[:, None]


def ar1_filter(e, rho=AR_RHO) -> np.ndarray:
    """Apply the Cholesky factor of the AR(1) correlation matrix 0.5^|i-j| along rows.

    x_1 = e_1, x_t = rho x_{t-1} + sqrt(1 - rho^2) e_t; the inverse factor is bidiagonal.
    """
    e = np.atleast_2d(np.asarray(e, dtype=np.float64)).copy()
    e[:, 1:] *= np.sqrt(1.0 - rho**2)
    return lfilter([1.0], [1.0, -rho], e, axis=1)


def ar1_whiten(x, rho=AR_RHO) -> np.ndarray:
    """Inverse of ``ar1_filter``: x' S^-1 x equals the squared norm of the result."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    out = x.copy()
    out[:, 1:] = (x[:, 1:] - rho * x[:, :-1]) / np.sqrt(1.0 - rho**2)
    return out


def paired_block_filter(e, rho=PAIR_RHO) -> np.ndarray:
    """Coordinates (2i-1, 2i) get correlation rho; an odd trailing coordinate stays independent."""
    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    x = e.copy()
    m = e.shape[1] // 2
    x[:, 1:2 * m:2] = rho * e[:, 0:2 * m:2] + np.sqrt(1.0 - rho**2) * e[:, 1:2 * m:2]
    return x


def structured_gaussian(n, d, mean=0.0, cov="ar1", scale=1.0, rng=None, rho=None) -> np.ndarray:
    """n draws from N(mean, scale * cov).

    ``cov`` is "ar1" (0.5^|i-j| by default), "paired-block" (0.98 pairs by default),
    a 1-d array of diagonal variances, or a full d x d matrix.
    """
    rng = _rng(rng)
    e = rng.standard_normal((n, d))
    if isinstance(cov, str):
        if cov == "ar1":
            z = ar1_filter(e, AR_RHO if rho is None else rho)
        elif cov == "paired-block":
            z = paired_block_filter(e, PAIR_RHO if rho is None else rho)
        else:
            raise ValueError(f"unknown covariance tag {cov!r}")
    else:
        c = np.asarray(cov, dtype=np.float64)
        if c.ndim == 1:
            if c.shape != (d,) or np.any(c <= 0):
                raise ValueError("diagonal covariance must be d positive variances")
            z = e * np.sqrt(c)
        else:
            if c.shape != (d, d):
                raise ValueError(f"covariance must be {d}x{d}, got {c.shape}")
            try:
                L = np.linalg.cholesky(c)
            except np.linalg.LinAlgError:
                raise ValueError("covariance matrix is not positive definite") from None
            z = e @ L.T
    return np.asarray(mean, dtype=np.float64) + np.sqrt(scale) * z


def ellipsoid_shell(n, d, i, rng) -> np.ndarray:
    """Uniform on {i - 1 <= x' S^-1 x <= i - 1/2} with S the AR(1) scatter matrix."""
    if i not in (1, 2, 3):
        raise ValueError(f"ellipsoidal shell index must be 1, 2 or 3, got {i}")
    y = uniform_shell(n, d, np.sqrt(i - 1.0), np.sqrt(i - 0.5), rng)
    return ar1_filter(y)


HALF_ANNULI = {
    # (centre x, inner radius, outer radius, upper half?)
    1: (2.0, 1.0, 1.5, True),
    2: (-2.0, 1.0, 1.5, True),
    3: (0.0, 4.0, 4.5, False),
}


def half_annulus(n, which, rng) -> np.ndarray:
    """n uniform points (x, y) in one of the three planar half-annuli."""
    if which not in HALF_ANNULI:
        raise ValueError(f"half-annulus index must be 1, 2 or 3, got {which}")
    cx, a, b, upper = HALF_ANNULI[which]
    # radius density proportional to r on [a, b]
    r = np.sqrt(a**2 + rng.uniform(size=n) * (b**2 - a**2))
    theta = rng.uniform(0.0, np.pi, size=n)
    if not upper:
        theta = theta + np.pi
    y = r * np.sin(theta)
    y = np.abs(y) if upper else -np.abs(y)
    return np.column_stack([cx + r * np.cos(theta), y])


def in_half_annulus(points, which) -> np.ndarray:
    cx, a, b, upper = HALF_ANNULI[which]
    x, y = points[..., 0], points[..., 1]
    r = np.hypot(x - cx, y)
    side = y >= 0 if upper else y <= 0
    return side & (r >= a - 1e-12) & (r <= b + 1e-12)


def ball_uniform(n, d, rng) -> np.ndarray:
    """Uniform in the unit ball: direction times U^(1/d)."""
    return uniform_shell(n, d, 0.0, 1.0, rng)


def cube_uniform(n, d, rng) -> np.ndarray:
    """Uniform in the largest cube inscribed in the unit ball (half side 1/sqrt(d))."""
    h = 1.0 / np.sqrt(d)
    return rng.uniform(-h, h, size=(n, d))


AR_PROCESSES = {
    # (intercept, coefficient, stationary variance)
    1: (0.75, 0.25, 16.0 / 15.0),
    2: (0.25, 0.75, 16.0 / 7.0),
}


def ar_process(n, d, which, rng) -> np.ndarray:
    """X_t = c + a X_{t-1} + N(0, 1) for t = 1..d, started from the stationary N(1, v)."""
    if which not in AR_PROCESSES:
        raise ValueError(f"AR process index must be 1 or 2, got {which}")
    c, a, v = AR_PROCESSES[which]
    x0 = 1.0 + np.sqrt(v) * rng.standard_normal(n)
    eps = rng.standard_normal((n, d))
    zi = (a * x0)[:, None]
    x, _ = lfilter([1.0], [1.0, -a], c + eps, axis=1, zi=zi)
    return x


def heavy_tail(n, d, kind, rng) -> np.ndarray:
    if kind == "t3":
        return rng.standard_t(3, size=(n, d))
    if kind == "cauchy":
        return rng.standard_cauchy(size=(n, d))
    raise ValueError(f"unknown heavy-tailed kind {kind!r}")


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    d: int
    sizes: tuple | None = None
    seed: object = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        sizes = self.class_sizes
        if len(sizes) != SCENARIOS[self.scenario].k0:
            raise ValueError(f"{self.scenario} has {SCENARIOS[self.scenario].k0} classes, got sizes {sizes}")
        if min(sizes) < 2:
            raise ValueError("every class needs at least 2 observations")

    @property
    def class_sizes(self) -> tuple:
        if self.sizes is None:
            info = SCENARIOS[self.scenario]
            return (info.default_size,) * info.k0
        if isinstance(self.sizes, int):
            return (self.sizes,) * SCENARIOS[self.scenario].k0
        return tuple(int(s) for s in self.sizes)


@dataclass
class LabeledSample:
    X: np.ndarray
    labels: np.ndarray
    scenario: str = ""
    notes: list = field(default_factory=list)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


def _alpha(d):
    return np.where(np.arange(1, d + 1) % 2 == 0, 1.0, 0.5)


def _gen_A(sizes, d, rng, notes):
    if d % 2:
        notes.append(f"odd d={d}: last coordinate is unpaired with unit variance")
    mu = np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
    return [
        structured_gaussian(sizes[0], d, 0.0, "paired-block", 0.5, rng),
        structured_gaussian(sizes[1], d, mu, "paired-block", 2.0, rng),
    ]


def _gen_B(sizes, d, rng, notes):
    shells = [(0.0, 0.5), (1.0, 1.5), (2.0, 2.5)]
    return [uniform_shell(m, d, a, b, rng, scale=np.sqrt(d)) for m, (a, b) in zip(sizes, shells)]


def _gen_ex1(sizes, d, rng, notes):
    h = d // 2
    mu2 = np.zeros(d)
    mu2[:h] = 0.75
    return [structured_gaussian(m, d, mu, "ar1", 1.0, rng) for m, mu in zip(sizes, (np.zeros(d), mu2, -mu2))]


def _gen_ex2(sizes, d, rng, notes):
    alpha = _alpha(d)
    beta = (-1.0) ** np.arange(1, d + 1) * alpha
    params = [(alpha, 1.0), (beta, 4.0), (-alpha, 1.0), (-beta, 4.0)]
    return [structured_gaussian(m, d, mu, "ar1", s, rng) for m, (mu, s) in zip(sizes, params)]


def _gen_ex3(sizes, d, rng, notes):
    return [ellipsoid_shell(m, d, i + 1, rng) for i, m in enumerate(sizes)]


def _gen_ex4(sizes, d, rng, notes):
    pairs = d // 2
    if d % 2:
        msg = f"Ex4 builds coordinates in planar pairs; odd d={d} rounded down to {2 * pairs}"
        notes.append(msg)
        warnings.warn(msg, stacklevel=3)
    out = []
    for i, m in enumerate(sizes):
        pts = half_annulus(m * pairs, i + 1, rng)
        out.append(pts.reshape(m, 2 * pairs))
    return out


def _gen_ex5(sizes, d, rng, notes):
    return [ar_process(m, d, i + 1, rng) for i, m in enumerate(sizes)]


def _gen_ex6(sizes, d, rng, notes):
    return [ball_uniform(sizes[0], d, rng), cube_uniform(sizes[1], d, rng)]


def _gen_ex7(sizes, d, rng, notes):
    h = d // 2
    first = np.where(np.arange(d) < h, 1.0, 9.0)
    even = np.where(np.arange(1, d + 1) % 2 == 0, 1.0, 9.0)
    patterns = [first, 10.0 - first, even, 10.0 - even]
    return [structured_gaussian(m, d, 0.0, v, 1.0, rng) for m, v in zip(sizes, patterns)]


def _gen_ex8(sizes, d, rng, notes, kind="t3"):
    return [np.sqrt(3.0) * rng.standard_normal((sizes[0], d)), heavy_tail(sizes[1], d, kind, rng)]


def _gen_null(sizes, d, rng, notes):
    return [rng.uniform(size=(sizes[0], d))]


@dataclass(frozen=True)
class ScenarioInfo:
    k0: int
    generate: object
    description: str
    default_size: int = DEFAULT_CLASS_SIZE


SCENARIOS = {
    "A": ScenarioInfo(2, _gen_A, "N(0, 0.5 S) vs N(mu, 2 S), paired 0.98 correlations"),
    "B": ScenarioInfo(3, _gen_B, "uniform on three concentric shells"),
    "Ex1": ScenarioInfo(3, _gen_ex1, "three AR(1) Gaussians differing in mean"),
    "Ex2": ScenarioInfo(4, _gen_ex2, "four AR(1) Gaussians differing in mean and scale"),
    "Ex3": ScenarioInfo(3, _gen_ex3, "uniform on three ellipsoidal shells"),
    "Ex4": ScenarioInfo(3, _gen_ex4, "iid planar half-annulus pairs"),
    "Ex5": ScenarioInfo(2, _gen_ex5, "two stationary AR(1) processes"),
    "Ex6": ScenarioInfo(2, _gen_ex6, "unit ball vs inscribed cube"),
    "Ex7": ScenarioInfo(4, _gen_ex7, "four zero-mean Gaussians with 1/9 variance patterns"),
    "Ex8": ScenarioInfo(2, _gen_ex8, "N(0, 3) vs t3 coordinates"),
    "Ex8-cauchy": ScenarioInfo(2, lambda s, d, r, n: _gen_ex8(s, d, r, n, "cauchy"), "N(0, 3) vs Cauchy coordinates"),
    "null-uniform": ScenarioInfo(1, _gen_null, "single uniform population on the unit cube", 100),
}


def true_k(scenario: str) -> int:
    return SCENARIOS[scenario].k0


def sample_scenario(spec: ScenarioSpec) -> LabeledSample:
    """Draw one labelled sample; bit-identical for a fixed spec and seed."""
    rng = _rng(spec.seed)
    sizes = spec.class_sizes
    notes = []
    blocks = SCENARIOS[spec.scenario].generate(sizes, spec.d, rng, notes)
    X = np.vstack(blocks)
    labels = np.repeat(np.arange(1, len(sizes) + 1), sizes)
    return LabeledSample(X, labels, spec.scenario, notes)
