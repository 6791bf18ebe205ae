"""Bregman divergences for the four exponential-family settings.

Each family is a strictly convex generator ``phi`` together with its gradient
and the closed-form divergence

    d_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>.

Vector inputs are handled coordinatewise and summed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("squared_euclidean", "binomial_kl", "poisson", "gamma")

# names used on the command line and in run configs
FAMILY_ALIASES = {
    "gaussian": "squared_euclidean",
    "binomial": "binomial_kl",
    "poisson": "poisson",
    "gamma": "gamma",
}

DOMAIN_EPS = 1e-12


class DomainError(ValueError):
    """A coordinate lies outside the generator's domain."""


@dataclass(frozen=True)
class DivergenceFamily:
    kind: str = "squared_euclidean"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown divergence kind {self.kind!r}; expected one of {KINDS}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @classmethod
    def from_name(cls, name: str, alpha: float = 1.0) -> "DivergenceFamily":
        """Build from a config name such as ``"gaussian"`` or a kind name."""
        kind = FAMILY_ALIASES.get(name, name)
        return cls(kind, alpha)

    @property
    def positive_support(self) -> bool:
        return self.kind != "squared_euclidean"

    @property
    def name(self) -> str:
        for alias, kind in FAMILY_ALIASES.items():
            if kind == self.kind:
                return alias
        return self.kind

    def check_domain(self, *arrays) -> None:
        if not self.positive_support:
            return
        for a in arrays:
            if np.any(np.asarray(a) <= DOMAIN_EPS):
                raise DomainError(
                    f"{self.kind} divergence requires coordinates > {DOMAIN_EPS:g}"
                )


SQUARED_EUCLIDEAN = DivergenceFamily("squared_euclidean")


def phi(family: DivergenceFamily, x) -> float | np.ndarray:
    """Generator value; sums over the last axis."""
    x = np.asarray(x, dtype=float)
    family.check_domain(x)
    if family.kind == "squared_euclidean":
        terms = x * x
    elif family.kind == "binomial_kl":
        terms = x * np.log(x)
    elif family.kind == "poisson":
        terms = x * np.log(x) - x
    else:
        a = family.alpha
        terms = a + a * np.log(a / x)
    return terms.sum(axis=-1)


def grad_phi(family: DivergenceFamily, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    family.check_domain(y)
    if family.kind == "squared_euclidean":
        return 2.0 * y
    if family.kind == "binomial_kl":
        return 1.0 + np.log(y)
    if family.kind == "poisson":
        return np.log(y)
    return -family.alpha / y


def _terms(family: DivergenceFamily, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if family.kind == "squared_euclidean":
        diff = x - y
        return diff * diff
    if family.kind in ("binomial_kl", "poisson"):
        return x * np.log(x / y) - (x - y)
    a = family.alpha
    return (a / y) * (y * np.log(y / x) + x - y)


def bregman(family: DivergenceFamily, x, y) -> float | np.ndarray:
    """Closed-form ``d_phi(x, y)``, broadcasting over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    family.check_domain(x, y)
    return _terms(family, x, y).sum(axis=-1)


def bregman_definition(family: DivergenceFamily, x, y) -> float | np.ndarray:
    """``phi(x) - phi(y) - <grad phi(y), x - y>`` evaluated literally."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return phi(family, x) - phi(family, y) - (grad_phi(family, y) * (x - y)).sum(axis=-1)


def pairwise(family: DivergenceFamily, X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """n x k matrix of ``d_phi(X[i], C[j])``; negatives from rounding are zeroed."""
    X = np.asarray(X, dtype=float)
    C = np.asarray(C, dtype=float)
    family.check_domain(X, C)
    # explicit differences rather than the expanded |x|^2 - 2xy + |y|^2 form,
    # which loses precision near zero
    D = _terms(family, X[:, None, :], C[None, :, :]).sum(axis=-1)
    return np.maximum(D, 0.0)
