"""Guarded grid search over the gravity parameters (eta, K, d).

Each candidate improves the dataset, fits Bregman power k-means to locate
centroids, and is scored by the summed Euclidean distance from every moved
point to its nearest centroid. The lowest score wins.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clustering import ClusterConfig, derived_seeds, fit
from .data import DataMatrix
from .divergence import SQUARED_EUCLIDEAN, DivergenceFamily, DomainError
from .gravity import GravityConfig, GuardViolation, improve
from .power_mean import PowerMeanConfig

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchGrid:
    eta0: float = 1.0
    delta_eta: float = 0.01
    K_range: tuple[int, int] = (1, 10)
    d_range: tuple[int, int] = (1, 10)
    delta_K: int = 1
    delta_d: int = 1
    # decoupled mode sweeps eta independently: eta0 - t * delta_eta, t < eta_count
    decoupled: bool = False
    eta_count: int = 10

    def __post_init__(self):
        if self.delta_eta < 0:
            raise ValueError("delta_eta must be nonnegative")
        if self.delta_K < 1 or self.delta_d < 1:
            raise ValueError("delta_K and delta_d must be >= 1")
        for lo, hi in (self.K_range, self.d_range):
            if not 1 <= lo <= hi:
                raise ValueError("K and d ranges must satisfy 1 <= low <= high")
        if self.eta_count < 1:
            raise ValueError("eta_count must be >= 1")


@dataclass
class ParamCandidate:
    eta: float
    K: int
    d: int
    objective: Optional[float] = None
    feasible: bool = True
    rejection_reason: Optional[str] = None


@dataclass
class SearchResult:
    best: ParamCandidate
    improved_data: DataMatrix
    all_candidates: list[ParamCandidate]
    centroid_source: dict = field(default_factory=dict)


def enumerate_grid(grid: SearchGrid) -> list[tuple[float, int, int]]:
    """All (eta, K, d) triples, K ascending then d ascending.

    In the default coupled mode each (K, d) gets ``eta = eta0 - K*d*delta_eta``.
    """
    Ks = range(grid.K_range[0], grid.K_range[1] + 1, grid.delta_K)
    ds = range(grid.d_range[0], grid.d_range[1] + 1, grid.delta_d)
    out = []
    for K in Ks:
        for d in ds:
            if grid.decoupled:
                out.extend(
                    (round(grid.eta0 - t * grid.delta_eta, 12), K, d)
                    for t in range(grid.eta_count)
                )
            else:
                out.append((round(grid.eta0 - K * d * grid.delta_eta, 12), K, d))
    if not out:
        raise SearchError("the search grid is empty")
    return out


def _bpk(data: DataMatrix, k: int, family: DivergenceFamily, seed: int):
    return fit(data, ClusterConfig("bregman_power", family, k, PowerMeanConfig(), seed=seed))


def centroid_objective(X: np.ndarray, C: np.ndarray) -> float:
    """Sum over points of the Euclidean distance to the nearest centroid."""
    diff = X[:, None, :] - C[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=-1)).min(axis=1).sum())


def score_candidate(
    data: DataMatrix,
    cand: tuple[float, int, int],
    k: int,
    family: DivergenceFamily = SQUARED_EUCLIDEAN,
    seed: int = 0,
    centroids: Optional[np.ndarray] = None,
) -> ParamCandidate:
    """Improve ``data`` with one candidate and score it.

    Failures (eta <= 0, K >= n, guard trips, domain errors) come back as
    infeasible candidates rather than exceptions. Passing ``centroids`` skips
    the per-candidate BPK fit and scores against those fixed centroids.
    """
    eta, K, d = cand
    c = ParamCandidate(eta, K, d)

    def reject(reason):
        c.feasible = False
        c.rejection_reason = reason
        return c

    if not eta > 0:
        return reject(f"eta={eta:g} is not positive")
    if K >= data.n:
        return reject(f"K={K} must be below n={data.n}")
    try:
        moved = improve(data, GravityConfig(eta, K, d))
        C = centroids if centroids is not None else _bpk(moved, k, family, seed).centroids.centroids
    except GuardViolation as exc:
        return reject(f"guard: {exc}")
    except DomainError as exc:
        return reject(f"domain: {exc}")
    c.objective = centroid_objective(moved.values, C)
    if not np.isfinite(c.objective):
        return reject("non-finite objective")
    return c


def _score_job(args):
    return score_candidate(*args)


def _better(a: ParamCandidate, b: ParamCandidate) -> bool:
    """True if ``a`` beats incumbent ``b``: lower objective, then smaller K,
    smaller d, larger eta."""
    if abs(a.objective - b.objective) > TIE_TOL * max(1.0, abs(b.objective)):
        return a.objective < b.objective
    return (a.K, a.d, -a.eta) < (b.K, b.d, -b.eta)


def search(
    data: DataMatrix,
    grid: SearchGrid,
    k: int,
    family: DivergenceFamily = SQUARED_EUCLIDEAN,
    seed: int = 0,
    centroid_source: str = "per_candidate",
    workers: int = 1,
) -> SearchResult:
    """Score every grid candidate and return the best with its improved data.

    ``centroid_source`` is ``"per_candidate"`` (BPK on each improved dataset)
    or ``"raw"`` (BPK once on the unimproved data, reused for every
    candidate). Each candidate's seed is derived from ``seed`` and its grid
    position, so results do not depend on ``workers``.
    """
    if centroid_source not in ("per_candidate", "raw"):
        raise ValueError(f"unknown centroid_source {centroid_source!r}")
    cands = enumerate_grid(grid)
    seeds = derived_seeds(seed, len(cands))
    fixed = None
    source = {"centroid_source": centroid_source, "method": "bregman_power",
              "family": family.name, "k": k}
    if centroid_source == "raw":
        raw_fit = _bpk(data, k, family, seed)
        fixed = raw_fit.centroids.centroids
        source.update(seed=seed, objective=raw_fit.objective)

    jobs = [(data, cand, k, family, s, fixed) for cand, s in zip(cands, seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(_score_job, jobs, chunksize=4))
    else:
        scored = [_score_job(j) for j in jobs]

    best = None
    best_pos = -1
    for pos, c in enumerate(scored):
        if c.feasible and (best is None or _better(c, best)):
            best, best_pos = c, pos
    if best is None:
        guarded = sum(1 for c in scored if (c.rejection_reason or "").startswith("guard"))
        raise SearchError(
            f"every candidate is infeasible ({guarded}/{len(scored)} tripped the "
            f"eta*G*K guard; rescaling the data shrinks G)"
        )
    logger.info("best candidate eta=%g K=%d d=%d objective=%.6g",
                best.eta, best.K, best.d, best.objective)
    improved = improve(data, GravityConfig(best.eta, best.K, best.d))
    if centroid_source == "per_candidate":
        source["seed"] = seeds[best_pos]
    return SearchResult(best, improved, scored, source)
