"""Comparison clusterers: average-linkage agglomerative and density peaks.

Both are deterministic. Their results reuse :class:`ClusterResult` with the
centroids set to the cluster means and the objective set to the summed
squared distance to those means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .clustering import CentroidSet, ClusterResult, ClusteringError
from .data import DataMatrix

TIE_TOL = 1e-12


@dataclass(frozen=True)
class PeakConfig:
    k: int
    dc_percentile: float = 0.02

    def __post_init__(self):
        if not 0 < self.dc_percentile < 1:
            raise ValueError("dc_percentile must lie in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def _relabel(labels: np.ndarray) -> np.ndarray:
    """Number clusters by first appearance so output is order-canonical."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inverse]


def _result(X: np.ndarray, labels: np.ndarray, method: str) -> ClusterResult:
    labels = _relabel(labels)
    k = labels.max() + 1
    counts = np.bincount(labels, minlength=k)
    C = np.zeros((k, X.shape[1]))
    np.add.at(C, labels, X)
    C /= counts[:, None]
    obj = float(((X - C[labels]) ** 2).sum())
    return ClusterResult(labels, CentroidSet(C), obj, 1, True, method, obj)


def agglomerative(data: DataMatrix, k: int) -> ClusterResult:
    """Average-linkage merging on Euclidean distance down to ``k`` clusters.

    Each cluster is held in the slot of its lowest member index, so among
    equally close pairs the merge with the smallest (i, j) slot pair wins.
    Distances within a relative ``TIE_TOL`` of the minimum count as equal,
    absorbing rounding from the Lance-Williams averaging.
    """
    X = data.values
    n = data.n
    if k > n:
        raise ClusteringError(f"k={k} exceeds the number of points n={n}")
    S = squareform(pdist(X))
    np.fill_diagonal(S, np.inf)
    size = np.ones(n)
    owner = np.arange(n)
    for _ in range(n - k):
        low = S.min()
        flat = np.flatnonzero(S.ravel() <= low + TIE_TOL * max(1.0, low))[0]
        i, j = divmod(int(flat), n)  # i < j: the upper-triangle hit comes first
        merged = (size[i] * S[i] + size[j] * S[j]) / (size[i] + size[j])
        S[i], S[:, i] = merged, merged
        S[i, i] = np.inf
        S[j], S[:, j] = np.inf, np.inf
        size[i] += size[j]
        owner[owner == j] = i
    return _result(X, owner, "agglomerative")


def density_peak(data: DataMatrix, config: PeakConfig) -> ClusterResult:
    """Density-peak clustering with a cutoff-count density.

    Density is the number of other points within the cutoff distance ``d_c``,
    taken as the ``dc_percentile`` quantile of all pairwise distances. Points
    are ranked by (density desc, index asc); each point's separation is its
    distance to the nearest higher-ranked point. The ``k`` largest
    density*separation products become centers and every other point inherits
    the cluster of its nearest higher-ranked point.
    """
    X = data.values
    n, k = data.n, config.k
    if k > n:
        raise ClusteringError(f"k={k} exceeds the number of points n={n}")
    if k == 1:
        return _result(X, np.zeros(n, dtype=int), "peak")
    condensed = pdist(X)
    if not np.any(condensed > 0):
        raise ClusteringError("all pairwise distances are zero")
    dc = np.quantile(condensed, config.dc_percentile)
    D = squareform(condensed)
    rho = (D < dc).sum(axis=1) - 1  # self at distance 0
    order = np.lexsort((np.arange(n), -rho))

    delta = np.empty(n)
    parent = np.full(n, -1)
    delta[order[0]] = D[order[0]].max()
    for pos in range(1, n):
        i = order[pos]
        higher = order[:pos]
        dists = D[i, higher]
        best = np.flatnonzero(dists == dists.min())
        # among equidistant higher-ranked points take the lowest index
        j = higher[best].min()
        parent[i] = j
        delta[i] = dists.min()

    gamma = rho * delta
    ranked = np.lexsort((np.arange(n), -gamma))
    centers = ranked[:k]
    labels = np.full(n, -1)
    labels[centers] = np.arange(k)
    top = order[0]
    if labels[top] < 0:
        # the density maximum has no higher-ranked point to inherit from
        labels[top] = labels[centers[np.argmin(D[top, centers])]]
    for i in order:
        if labels[i] < 0:
            labels[i] = labels[parent[i]]
    return _result(X, labels, "peak")
