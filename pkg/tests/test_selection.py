import json
import math

import numpy as np
import pytest

from maddclust.clustering import ClusterAssignment
from maddclust.datagen import ScenarioSpec, sample_scenario
from maddclust.dissimilarity import RHO0, base_distance_matrix, madd_matrix
from maddclust.methods import Method
from maddclust.selection import (
    KSweep,
    PenaltySpec,
    build_sweep,
    cv_select,
    cv_split_size,
    dunn_index,
    dunn_select,
    estimate_k,
    gap_rule,
    gap_select,
    instability,
    jump_select,
    jump_statistic,
    kl_select,
    kl_statistic,
    pd_select,
    within_dispersion,
)


class StubSweep:
    """Sweep with prescribed Dunn parts, for exercising the selection rules."""

    def __init__(self, parts):
        self.parts = parts
        self.ks = sorted(parts)
        self.d = 500

    def dunn_parts(self, k):
        return self.parts[k]


def small_sweep(seed=0, n=24, d=50):
    X = np.random.default_rng(seed).normal(size=(n, d))
    X[: n // 2] += 2.0
    return build_sweep(X, "avgl:rho0", 8)


# dispersion

def test_within_dispersion_hand_values():
    D = np.array([[0, 1.0], [1.0, 0]])
    assert within_dispersion(D, [1, 2]) == 0.0
    assert within_dispersion(D, [1, 1]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        within_dispersion(D, [1, 1, 2])


def test_within_dispersion_non_increasing_on_nested_cuts():
    sweep = small_sweep()
    W = [sweep.W[k] for k in sweep.ks]
    assert np.all(np.diff(W) <= 1e-12)


# KL

def test_kl_hand_series():
    W = {1: 10.0, 2: 10.0, 3: 1.0, 4: 0.9, 5: 0.85, 6: 0.82}
    ks, stats, _ = kl_statistic(W, 500)
    assert ks == [2, 3, 4, 5]
    assert ks[int(np.argmax(stats))] == 3
    diff = lambda k: (k - 1) ** (2 / 500) * W[k - 1] - k ** (2 / 500) * W[k]  # noqa: E731
    assert stats[1] == pytest.approx(abs(diff(3) / diff(4)))


def test_kl_constant_series_is_finite():
    ks, stats, flagged = kl_statistic({k: 5.0 for k in range(1, 8)}, 500)
    assert all(math.isfinite(s) for s in stats) and not flagged


def test_kl_zero_denominator_flagged():
    ks, stats, flagged = kl_statistic({1: 4.0, 2: 2.0, 3: 2.0 * (2 / 3) ** (2 / 10), 4: 1.0}, 10)
    assert flagged == [2] and math.isinf(stats[0])


# Jump

def test_jump_hand_series():
    ks, stats, _ = jump_statistic({1: 4.0, 2: 1.0, 3: 0.5}, 1.0, "madd", 500)
    np.testing.assert_allclose(stats, [0.25, 0.75, 1.0])
    ks, stats_e, _ = jump_statistic({1: 4.0 * 7, 2: 7.0, 3: 3.5}, 1.0, "euclid", 7)
    np.testing.assert_allclose(stats_e, stats)


def test_jump_geometric_decay_flags_boundary():
    sweep = small_sweep()
    geo = KSweep.__new__(KSweep)
    geo.W = {k: 0.5**k for k in range(1, 9)}
    geo.d = 50
    rep = jump_select(geo, 1.0, "madd", k_max=8)
    assert rep.k_hat == 8 and rep.diagnostics["boundary"]
    assert jump_select(sweep, 1.0, "madd").k_hat >= 1


def test_jump_requires_positive_t():
    with pytest.raises(ValueError):
        jump_statistic({1: 1.0}, 0.0, "madd", 10)


# Dunn and penalized Dunn

def test_dunn_hand_value():
    D = np.array([[0, 0.1, 1.0], [0.1, 0, 1.2], [1.0, 1.2, 0]])
    assert dunn_index(D, [1, 1, 2]) == pytest.approx(11.0)


def test_dunn_zero_within_is_infinite():
    D = np.array([[0, 0, 3, 3], [0, 0, 3, 3], [3, 3, 0, 0], [3, 3, 0, 0.0]])
    assert math.isinf(dunn_index(D, [1, 1, 2, 2]))


def test_dunn_scale_invariant():
    X = np.random.default_rng(3).normal(size=(12, 6))
    D = madd_matrix(base_distance_matrix(X, RHO0))
    labels = [1, 1, 1, 2, 2, 2, 3, 3, 3, 1, 2, 3]
    assert dunn_index(D.scaled(7.5), labels) == pytest.approx(dunn_index(D, labels))


def test_dunn_select_rules():
    parts = {2: (11.0, 1.0, 0), 3: (2.0, 1.0, 0), 4: (1.5, 1.0, 0)}
    assert dunn_select(StubSweep(parts)).k_hat == 2
    equal = {k: (1.0, 1.0, 0) for k in (2, 3, 4)}
    assert dunn_select(StubSweep(equal)).k_hat == 2


def test_penalty_constant():
    assert PenaltySpec().zeta(500) == pytest.approx(0.015 * math.log(500))
    assert PenaltySpec().zeta(500) == pytest.approx(0.09321, abs=1e-5)
    with pytest.raises(ValueError):
        PenaltySpec(0.0)


def test_pd_uses_b2_for_k1():
    sweep = small_sweep(1)
    rep = pd_select(sweep, PenaltySpec(), 50)
    b2 = sweep.dunn_parts(2)[0]
    _, w1, _ = sweep.dunn_parts(1)
    assert rep.diagnostics["B1"] == b2
    assert rep.statistic[0] == pytest.approx(b2 / w1 - PenaltySpec().zeta(50))
    for k, v in zip(rep.ks, rep.statistic):
        b, w, _ = sweep.dunn_parts(2 if k == 1 else k)
        w = sweep.dunn_parts(k)[1]
        assert v == pytest.approx(b / w - k * PenaltySpec().zeta(50))


def test_selections_scale_invariant():
    sweep = small_sweep(2)
    scaled = KSweep(sweep.D.scaled(13.0), sweep.assignments, sweep.method, sweep.d)
    for select in (dunn_select, lambda s: pd_select(s, d=50), lambda s: kl_select(s, 50)):
        assert select(scaled).k_hat == select(sweep).k_hat


def test_report_json_round_trip():
    D = np.array([[0, 0, 3, 3], [0, 0, 3, 3], [3, 3, 0, 0], [3, 3, 0, 0.0]])
    sweep = KSweep(madd_matrix(D), {k: ClusterAssignment.from_labels(l) for k, l in
                                     {1: [1, 1, 1, 1], 2: [1, 1, 2, 2], 3: [1, 2, 3, 3]}.items()})
    rep = dunn_select(sweep)
    text = json.dumps(rep.as_dict())
    assert '"inf"' in text and rep.k_hat == 2


# Gap

def test_gap_rule_hand_series():
    assert gap_rule([0.5, 0.3, 0.2], [0, 0, 0]) == 1
    assert gap_rule([0.1, 0.3, 0.2], [0, 0, 0]) == 2
    assert gap_rule([0.1, 0.2, 0.3], [0, 0, 0]) is None


def test_gap_degenerate_dispersion():
    X = np.tile(np.arange(5.0), (20, 1))
    with pytest.raises(ValueError, match="degenerate dispersion"):
        gap_select(X, "avgl:rho0", 4, B=5)


def test_gap_constant_feature_allowed_and_deterministic():
    X = np.random.default_rng(4).normal(size=(20, 6))
    X[:, 2] = 1.0
    X[:10] += 3
    a = gap_select(X, "avgl:rho0", 5, B=5, seed=3)
    b = gap_select(X, "avgl:rho0", 5, B=5, seed=3)
    assert a.k_hat == b.k_hat and a.statistic == b.statistic
    assert len(a.diagnostics["s"]) == 5


def test_gap_ball_vs_cube():
    s = sample_scenario(ScenarioSpec("Ex6", 500, 30, 1))
    assert gap_select(s.X, "avgl:rho0", 12, B=20, seed=1).k_hat == 2


# CV instability

def test_instability_extremes():
    assert instability([1, 1, 2, 2, 3], [2, 2, 3, 3, 1]) == 0.0
    assert instability(np.ones(6), np.arange(6)) == 1.0


def test_split_size_and_small_n():
    assert cv_split_size(90) == 30 and cv_split_size(100) == 30 and cv_split_size(15) == 5
    with pytest.raises(ValueError):
        cv_select(np.random.default_rng(0).normal(size=(14, 3)), "avgl:rho0")


def test_cv_example_1():
    s = sample_scenario(ScenarioSpec("Ex1", 500, 30, 1))
    cv_a, cv_v = cv_select(s.X, "avgl:rho0", 12, B=20, seed=1)
    assert (cv_a.k_hat, cv_v.k_hat) == (3, 3)


def test_cv_euclidean_kmeans_runs():
    s = sample_scenario(ScenarioSpec("Ex1", 50, 20, 2))
    cv_a, cv_v = cv_select(s.X, "km:euclid", 6, B=3, seed=2)
    assert 2 <= cv_a.k_hat <= 6 and 2 <= cv_v.k_hat <= 6


# single-seed checks on the simulated examples

def test_kl_example_1():
    s = sample_scenario(ScenarioSpec("Ex1", 500, 30, 1))
    assert kl_select(build_sweep(s.X, "avgl:rho0", 13), 500).k_hat == 3


def test_jump_example_2_kmeans():
    s = sample_scenario(ScenarioSpec("Ex2", 500, 30, 1))
    assert jump_select(build_sweep(s.X, "km:rho0", 13, seed=1), 1.0, "madd").k_hat == 4


def test_dunn_example_4_kmeans():
    s = sample_scenario(ScenarioSpec("Ex4", 500, 30, 1))
    assert dunn_select(build_sweep(s.X, "km:rho0", 13, seed=1)).k_hat == 3


def test_pd_example_7_rho2():
    s = sample_scenario(ScenarioSpec("Ex7", 500, 30, 1))
    assert pd_select(build_sweep(s.X, "avgl:rho2", 13), d=500).k_hat == 4


def test_estimate_k_interface():
    s = sample_scenario(ScenarioSpec("Ex3", 200, 20, 1))
    out = estimate_k(s.X, Method.parse("avgl:rho0"), ["dunn", "pd", "kl", "jump"], 8, seed=1)
    assert set(out) == {"dunn", "pd", "kl", "jump"}
    with pytest.raises(ValueError):
        estimate_k(s.X, "avgl:rho0", ["elbow"])
