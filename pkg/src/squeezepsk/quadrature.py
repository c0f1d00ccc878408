"""Averages over a Gaussian-distributed phase.

Every integrand in this package is a 2*pi-periodic function of the phase, so
the Gaussian average over the whole real line equals the average against the
wrapped normal density on one period. Narrow phase distributions are handled
with Gauss-Hermite nodes; once the Gaussian is wider than about a quarter
radian, the periodic trapezoid rule with wrapped-normal weights converges far
faster and is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_hermite

from .errors import QuadratureNotConverged, ValidationError

NODE_COUNTS = (16, 32, 64, 128, 256, 512, 1024)
DEFAULT_TOL = 1e-10
WRAP_SIGMA = 0.25


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Phase nodes and normalized weights for one value of sigma."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    sigma: float

    @property
    def size(self) -> int:
        return len(self.nodes)

    def average(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, func(self.nodes)))


@lru_cache(maxsize=None)
def _hermite(n: int):
    t, w = roots_hermite(n)
    return math.sqrt(2.0) * t, w / w.sum()


def gauss_hermite(n: int, sigma: float) -> QuadratureRule:
    z, w = _hermite(n)
    return QuadratureRule(sigma * z, w, "gauss-hermite", sigma)


def wrapped_trapezoid(n: int, sigma: float) -> QuadratureRule:
    phi = -math.pi + 2.0 * math.pi * np.arange(n) / n
    # wrapped normal density as a Fourier series; drop terms below 1e-18
    kmax = max(1, math.ceil(math.sqrt(2.0 * 41.5) / sigma))
    k = np.arange(1, kmax + 1)
    coeff = np.exp(-0.5 * (k * sigma) ** 2)
    density = 1.0 + 2.0 * (coeff @ np.cos(np.outer(k, phi)))
    weights = density / density.sum()
    return QuadratureRule(phi, weights, "wrapped-trapezoid", sigma)


def phase_rule(n: int, sigma: float) -> QuadratureRule:
    if n not in NODE_COUNTS:
        raise ValidationError(f"node count must be one of {NODE_COUNTS}, got {n}")
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return QuadratureRule(np.zeros(1), np.ones(1), "point", 0.0)
    if sigma < WRAP_SIGMA:
        return gauss_hermite(n, sigma)
    return wrapped_trapezoid(n, sigma)


def adaptive_average(
    func: Callable[[np.ndarray], np.ndarray], sigma: float, tol: float = DEFAULT_TOL
) -> tuple[float, QuadratureRule]:
    """Average of ``func(phi)`` over phi ~ N(0, sigma^2), doubling nodes until
    two successive estimates agree to `tol`.

    Returns the value and the rule that produced it.

    Raises:
        QuadratureNotConverged: 1024 nodes do not reach `tol`.
    """
    if sigma == 0:
        rule = phase_rule(NODE_COUNTS[0], 0.0)
        return rule.average(func), rule
    previous = None
    for n in NODE_COUNTS:
        rule = phase_rule(n, sigma)
        value = rule.average(func)
        if previous is not None and abs(value - previous) < tol:
            return value, rule
        previous = value
    raise QuadratureNotConverged(
        f"phase average at sigma={sigma} not converged to {tol:g} with {NODE_COUNTS[-1]} nodes"
    )


def phase_average(func, sigma: float, rule: QuadratureRule | None = None, tol: float = DEFAULT_TOL) -> float:
    if rule is not None:
        if rule.sigma != sigma:
            raise ValidationError(f"rule built for sigma={rule.sigma}, asked for {sigma}")
        return rule.average(func)
    return adaptive_average(func, sigma, tol)[0]
