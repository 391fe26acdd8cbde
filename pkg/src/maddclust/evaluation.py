"""Rand index in the disagreement convention: 0 means the two partitions agree exactly.

This is one minus the classical (agreement) Rand index; it is the fraction of
observation pairs that exactly one of the two partitions puts together.
"""

import numpy as np

__all__ = ["rand_index", "pair_disagreement"]


def _contingency(a, b):
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def rand_index(true_labels, pred_labels) -> float:
    """Fraction of pairs on which exactly one partition groups the pair together."""
    a = np.asarray(getattr(true_labels, "labels", true_labels)).ravel()
    b = np.asarray(getattr(pred_labels, "labels", pred_labels)).ravel()
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    n = a.size
    if n < 2:
        raise ValueError("rand index needs at least two observations")
    table = _contingency(a, b)
    comb2 = lambda c: (c * (c - 1)) // 2  # noqa: E731
    both = comb2(table).sum()
    same_a = comb2(table.sum(axis=1)).sum()
    same_b = comb2(table.sum(axis=0)).sum()
    disagree = same_a + same_b - 2 * both
    return float(disagree) / float(comb2(n))


pair_disagreement = rand_index
