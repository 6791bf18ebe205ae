"""External validity indices: adjusted Rand index and normalized mutual information."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricReport:
    ari: float
    nmi: float
    n: int


def contingency(truth, pred) -> np.ndarray:
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape or truth.ndim != 1:
        raise ValueError(
            f"label vectors must be 1-D with equal length, got {truth.shape} and {pred.shape}"
        )
    _, t = np.unique(truth, return_inverse=True)
    _, p = np.unique(pred, return_inverse=True)
    table = np.zeros((t.max(initial=-1) + 1, p.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (t, p), 1)
    return table


def _pairs(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2


def ari(truth, pred) -> float:
    """Adjusted Rand index.

    When the chance-adjusted denominator vanishes (both partitions are all
    singletons or a single block) the score is 1 for identical partitions and
    0 otherwise.
    """
    table = contingency(truth, pred)
    n = table.sum()
    if n < 2:
        raise ValueError("ARI needs at least two points")
    index = _pairs(table).sum()
    a = _pairs(table.sum(axis=1)).sum()
    b = _pairs(table.sum(axis=0)).sum()
    expected = a * b / _pairs(n)
    max_index = (a + b) / 2
    if max_index == expected:
        return 1.0 if index == a == b else 0.0
    return float((index - expected) / (max_index - expected))


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(truth, pred) -> float:
    """Mutual information over the arithmetic mean of the two entropies."""
    table = contingency(truth, pred)
    n = int(table.sum())
    if n < 1:
        raise ValueError("NMI needs at least one point")
    h_t = _entropy(table.sum(axis=1), n)
    h_p = _entropy(table.sum(axis=0), n)
    if h_t == 0 and h_p == 0:
        return 1.0
    if h_t == 0 or h_p == 0:
        return 0.0
    rows, cols = np.nonzero(table)
    joint = table[rows, cols] / n
    outer = table.sum(axis=1)[rows] * table.sum(axis=0)[cols] / n**2
    mi = float((joint * np.log(joint / outer)).sum())
    return float(np.clip(mi / ((h_t + h_p) / 2), 0.0, 1.0))


def report(truth, pred) -> MetricReport:
    return MetricReport(ari(truth, pred), nmi(truth, pred), len(truth))


def increment(old: float, new: float) -> float:
    """Relative change ``(new - old) / old`` in percent."""
    return 100.0 * (new - old) / old
