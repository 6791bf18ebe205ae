"""Power means, their gradients, and the majorization weights built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

TINY = 1e-300
LOG_SPACE_BELOW = -5.0


@dataclass(frozen=True)
class PowerMeanConfig:
    s0: float = -0.2
    anneal_factor: float = 1.05
    s_min: float = -20.0

    def __post_init__(self):
        if not self.s0 < 0:
            raise ValueError("s0 must be negative")
        if not self.anneal_factor > 1:
            raise ValueError("anneal_factor must exceed 1")
        if not self.s_min <= self.s0:
            raise ValueError("s_min must not exceed s0")

    def next_s(self, s: float) -> float:
        return max(s * self.anneal_factor, self.s_min)


def _log_mean_pow(log_y: np.ndarray, s: float) -> np.ndarray:
    """log((1/k) sum_i y_i^s) along the last axis."""
    k = log_y.shape[-1]
    return logsumexp(s * log_y, axis=-1) - np.log(k)


def power_mean(y, s: float) -> float | np.ndarray:
    """M_s(y) = ((1/k) sum y_i^s)^(1/s) over the last axis.

    Zero entries are clamped to ``TINY`` for negative ``s``.
    """
    if s == 0:
        raise ValueError("power mean with s = 0 is not supported")
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("power mean needs nonnegative entries")
    if s < 0:
        y = np.maximum(y, TINY)
    if s <= LOG_SPACE_BELOW:
        return np.exp(_log_mean_pow(np.log(y), s) / s)
    return np.mean(y**s, axis=-1) ** (1.0 / s)


def power_mean_grad(y, s: float) -> np.ndarray:
    """Partial derivatives of M_s with respect to each entry of ``y``."""
    if s == 0:
        raise ValueError("power mean with s = 0 is not supported")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("power mean gradient needs strictly positive entries")
    k = y.shape[-1]
    log_y = np.log(y)
    log_m = _log_mean_pow(log_y, s)[..., None]
    return np.exp((1.0 / s - 1.0) * log_m + (s - 1.0) * log_y - np.log(k))


def mm_weights(distances, s: float) -> np.ndarray:
    """Majorizer weights w_ij = (mean_l d_il^s)^(1/s - 1) * d_ij^(s - 1).

    Evaluated in log space. The whole matrix is divided by its largest entry,
    a single constant that cancels in the weighted-mean centroid update.
    """
    D = np.asarray(distances, dtype=float)
    if D.ndim != 2:
        raise ValueError("distances must be an n x k matrix")
    if np.any(D < 0) or not np.all(np.isfinite(D)):
        raise ValueError("distances must be finite and nonnegative")
    log_d = np.log(np.maximum(D, TINY))
    log_m = _log_mean_pow(log_d, s)[:, None]
    log_w = (1.0 / s - 1.0) * log_m + (s - 1.0) * log_d
    W = np.exp(log_w - log_w.max())
    if np.any(W.max(axis=1) <= 0):
        raise FloatingPointError("a weight row underflowed to zero")
    return W


def soft_objective(distances, s: float) -> float:
    """Sum over rows of M_s of the distance row."""
    return float(np.sum(power_mean(distances, s)))
