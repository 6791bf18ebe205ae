"""KNN-gravity dataset improvement.

Every iteration ``z = 1..d`` recomputes each point's K nearest neighbours
``o_i1..o_iK`` and its coefficient

    G_i(z) = mean_j |o_ij - x_i| * exp(-alpha * z / d)

then moves all points simultaneously:

    x_i <- x_i + eta * G_i(z) * sum_j |o_i1 - x_i| / |o_ij - x_i| * (o_ij - x_i)

A move is only admitted while ``eta * G_i * K < 2`` for every point, the
condition under which the simplified update (ratio term set to 1) contracts
each point toward the mean of its neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .data import DataMatrix

GUARD_LIMIT = 2.0


class GuardViolation(ValueError):
    def __init__(self, point: int, value: float, iteration: int):
        self.point = point
        self.value = value
        self.iteration = iteration
        super().__init__(
            f"eta*G*K = {value:.6g} >= {GUARD_LIMIT:g} at point {point}, iteration {iteration}"
        )


@dataclass(frozen=True)
class GravityConfig:
    eta: float
    K: int
    d: int
    alpha: float = 1.0
    # only enters the unsimplified force law; recorded for completeness
    epsilon: float = 0.01

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.K < 1 or self.d < 1:
            raise ValueError("K and d must be >= 1")


@dataclass
class NeighborSet:
    indices: np.ndarray
    distances: np.ndarray


@dataclass
class GravityState:
    """Snapshot of one iteration, collected when tracing."""

    z: int
    start: np.ndarray
    neighbors: NeighborSet
    G: np.ndarray
    displacement: np.ndarray


def _coords(data) -> np.ndarray:
    return data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)


def knn(data, K: int) -> NeighborSet:
    """Exact K nearest neighbours by Euclidean distance, self excluded.

    Distance ties go to the lower index.
    """
    X = _coords(data)
    n = len(X)
    if not 1 <= K < n:
        raise ValueError(f"need 1 <= K < n, got K={K}, n={n}")
    D = cdist(X, X)
    np.fill_diagonal(D, np.inf)
    idx = np.argsort(D, axis=1, kind="stable")[:, :K]
    return NeighborSet(idx, np.take_along_axis(D, idx, axis=1))


def gravity_coefficient(
    data, neighbors: NeighborSet, z: int, d: int, alpha: float = 1.0
) -> np.ndarray:
    if not 1 <= z <= d:
        raise ValueError(f"iteration z={z} outside 1..{d}")
    return neighbors.distances.mean(axis=1) * np.exp(-alpha * z / d)


def pull(X: np.ndarray, neighbors: NeighborSet) -> np.ndarray:
    """sum_j |o_i1 - x_i| / |o_ij - x_i| * (o_ij - x_i) for every point."""
    dist = neighbors.distances
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dist > 0, dist[:, :1] / dist, 0.0)
    offsets = X[neighbors.indices] - X[:, None, :]
    return np.einsum("ij,ijk->ik", ratio, offsets)


def improve(data: DataMatrix, config: GravityConfig, trace: Optional[list] = None) -> DataMatrix:
    """Apply ``config.d`` gravity iterations and return the moved dataset.

    Raises
    ------
    GuardViolation
        If ``eta * G_i * K >= 2`` for some point at some iteration.
    """
    X = data.values.copy()
    for z in range(1, config.d + 1):
        nb = knn(X, config.K)
        G = gravity_coefficient(X, nb, z, config.d, config.alpha)
        guard = config.eta * G * config.K
        worst = int(np.argmax(guard))
        if guard[worst] >= GUARD_LIMIT:
            raise GuardViolation(worst, float(guard[worst]), z)
        step = config.eta * G[:, None] * pull(X, nb)
        if trace is not None:
            trace.append(GravityState(z, X.copy(), nb, G, step))
        X = X + step
    return data.with_values(X)
