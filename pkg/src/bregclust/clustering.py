"""Centroid clusterers: k-means, Bregman hard clustering and their power-mean
annealed counterparts.

The hard methods alternate nearest-centroid assignment with a mean update,
which is the exact minimizer of the summed divergence for any Bregman
divergence taken in its second argument. The power methods run the
majorization-minimization update (weighted means with weights from
:func:`bregclust.power_mean.mm_weights`) while driving the power ``s``
toward minus infinity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import DataMatrix
from .divergence import DOMAIN_EPS, SQUARED_EUCLIDEAN, DivergenceFamily, pairwise
from .power_mean import PowerMeanConfig, mm_weights, power_mean

logger = logging.getLogger(__name__)

METHODS = ("kmeans", "bregman_hard", "kmeans_power", "bregman_power")
POWER_METHODS = ("kmeans_power", "bregman_power")


class ClusteringError(RuntimeError):
    pass


@dataclass
class CentroidSet:
    centroids: np.ndarray
    power_s: Optional[float] = None

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass
class ClusterResult:
    assignments: np.ndarray
    centroids: CentroidSet
    objective: float
    iterations: int
    converged: bool
    method: str = ""
    # the s -> -inf surrogate: summed nearest-centroid divergence
    hard_objective: float = float("nan")


@dataclass(frozen=True)
class ClusterConfig:
    method: str = "bregman_power"
    family: DivergenceFamily = field(default=SQUARED_EUCLIDEAN)
    k: int = 3
    power: PowerMeanConfig = field(default_factory=PowerMeanConfig)
    max_iters: int = 100
    tol: float = 1e-6
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method in ("kmeans", "kmeans_power") and self.family != SQUARED_EUCLIDEAN:
            # the Euclidean methods are defined by their divergence
            object.__setattr__(self, "family", SQUARED_EUCLIDEAN)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be >= 1")


def derived_seeds(seed: int, count: int) -> list[int]:
    """Independent child seeds; stable for a given (seed, count) prefix."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def init_centroids(
    data: DataMatrix, k: int, seed: int, family: DivergenceFamily = SQUARED_EUCLIDEAN
) -> CentroidSet:
    """Draw ``k`` centroids uniformly from the data's bounding box."""
    if k > data.n:
        raise ClusteringError(f"k={k} exceeds the number of points n={data.n}")
    rng = np.random.default_rng(seed)
    lo = data.values.min(axis=0)
    hi = data.values.max(axis=0)
    C = lo + rng.random((k, data.m)) * (hi - lo)
    if family.positive_support:
        C = np.maximum(C, 2 * DOMAIN_EPS)
    return CentroidSet(C)


def _values(data) -> np.ndarray:
    return data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)


def _centroids(c) -> np.ndarray:
    return c.centroids if isinstance(c, CentroidSet) else np.asarray(c, dtype=float)


def assign(data, centroids, family: DivergenceFamily = SQUARED_EUCLIDEAN) -> np.ndarray:
    """Index of the divergence-nearest centroid per point; ties go to the lower index."""
    D = pairwise(family, _values(data), _centroids(centroids))
    return np.argmin(D, axis=1)


def hard_objective(X, C, family: DivergenceFamily) -> float:
    return float(pairwise(family, X, C).min(axis=1).sum())


def soft_objective(X, C, family: DivergenceFamily, s: float) -> float:
    return float(power_mean(pairwise(family, X, C), s).sum())


def _reseed(X: np.ndarray, C: np.ndarray, empty, family: DivergenceFamily) -> np.ndarray:
    """Move each listed centroid onto the point farthest from its nearest centroid."""
    C = C.copy()
    keep = np.ones(len(C), dtype=bool)
    keep[list(empty)] = False
    for j in empty:
        nearest = pairwise(family, X, C[keep]).min(axis=1) if keep.any() else np.zeros(len(X))
        i = int(np.argmax(nearest))
        logger.debug("re-seeding centroid %d at point %d", j, i)
        C[j] = X[i]
        keep[j] = True
    return C


def lloyd_step(data, centroids, family: DivergenceFamily = SQUARED_EUCLIDEAN) -> CentroidSet:
    """Assign, then move every centroid to the mean of its points."""
    X = _values(data)
    C = _centroids(centroids)
    labels = assign(X, C, family)
    k = len(C)
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(C)
    np.add.at(sums, labels, X)
    new = C.copy()
    filled = counts > 0
    new[filled] = sums[filled] / counts[filled, None]
    empty = np.flatnonzero(~filled)
    if len(empty):
        new = _reseed(X, new, empty, family)
    return CentroidSet(new)


def bpk_step(data, centroids, family: DivergenceFamily, s: float) -> CentroidSet:
    """One majorization-minimization update at power ``s``.

    Each centroid becomes the weighted mean of all points, with weights
    w_ij from the power-mean gradient at the current distances.
    """
    if not s < 0:
        raise ValueError("bpk_step needs s < 0")
    X = _values(data)
    C = _centroids(centroids)
    W = mm_weights(pairwise(family, X, C), s)
    mass = W.sum(axis=0)
    new = C.copy()
    live = mass > 0
    new[live] = (W[:, live].T @ X) / mass[live, None]
    dead = np.flatnonzero(~live)
    if len(dead):
        new = _reseed(X, new, dead, family)
    return CentroidSet(new, power_s=s)


def _fit_once(X: np.ndarray, C: np.ndarray, config: ClusterConfig) -> ClusterResult:
    family = config.family
    power = config.method in POWER_METHODS
    s = config.power.s0 if power else None

    def score(C_, s_):
        return soft_objective(X, C_, family, s_) if power else hard_objective(X, C_, family)

    prev = score(C, s)
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        if power:
            C = bpk_step(X, C, family, s).centroids
        else:
            C = lloyd_step(X, C, family).centroids
        obj = score(C, s)
        if not np.isfinite(obj):
            raise ClusteringError(
                f"{config.method}: objective became {obj} at iteration {it} (s={s})"
            )
        if abs(prev - obj) <= config.tol * max(abs(prev), np.finfo(float).tiny):
            converged = True
            break
        if power:
            s = config.power.next_s(s)
            obj = score(C, s)
        prev = obj
    final = score(C, s)
    return ClusterResult(
        assignments=assign(X, C, family),
        centroids=CentroidSet(C, power_s=s),
        objective=final,
        iterations=it,
        converged=converged,
        method=config.method,
        hard_objective=hard_objective(X, C, family),
    )


def fit(data: DataMatrix, config: ClusterConfig) -> ClusterResult:
    """Run ``config.restarts`` seeded fits and keep the best.

    Restarts are ranked by the hard (nearest-centroid) objective so that power
    runs ending at different ``s`` remain comparable.
    """
    X = _values(data)
    config.family.check_domain(X)
    best = None
    for seed in derived_seeds(config.seed, config.restarts):
        C0 = init_centroids(DataMatrix(X), config.k, seed, config.family).centroids
        result = _fit_once(X, C0, config)
        if best is None or result.hard_objective < best.hard_objective:
            best = result
    return best
