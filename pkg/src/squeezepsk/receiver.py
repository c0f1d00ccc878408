"""Homodyne receiver error probabilities.

The receiver measures x_0 and decides "+" for x >= 0, "-" otherwise. With
equal priors and the symmetric pair ``|+-alpha, r>`` the error probability is
the probability that the "-" state lands on x >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from . import quadrature
from .errors import UnknownKind, ValidationError
from .gaussian_core import ChannelBudget, SeedState, budget_to_seed
from .quadrature import QuadratureRule


@dataclass(frozen=True)
class PhaseNoise:
    sigma: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def delta(self) -> float:
        """Diffusion strength Gamma * t."""
        return 0.5 * self.sigma**2


NOISELESS = PhaseNoise(0.0)


def error_probability_pure(budget: ChannelBudget) -> float:
    """Closed form ``erfc(sqrt(2) alpha / Sigma) / 2`` for a pure, noiseless channel."""
    n, beta = budget.energy, budget.squeezing_fraction
    alpha = math.sqrt(n * (1.0 - beta))
    inv_sigma = math.sqrt(n * beta) + math.sqrt(1.0 + n * beta)
    return 0.5 * math.erfc(math.sqrt(2.0) * alpha * inv_sigma)


def conditional_error(seed: SeedState, phase):
    """Error probability given a phase kick; vectorized over `phase`."""
    c = np.cos(phase)
    s = np.sin(phase)
    r = seed.squeezing
    variance = (2.0 * seed.thermal_photons + 1.0) * (
        math.exp(-2.0 * r) * c * c + math.exp(2.0 * r) * s * s
    )
    return 0.5 * erfc(2.0 * seed.alpha * c / np.sqrt(2.0 * variance))


def error_probability(
    budget: ChannelBudget,
    purity: float = 1.0,
    noise: PhaseNoise = NOISELESS,
    rule: QuadratureRule | None = None,
) -> float:
    """Homodyne error probability under phase diffusion and an impure seed.

    Averages the conditional error over phi ~ N(0, sigma^2). With no `rule`
    the node count is doubled until successive values agree to 1e-10.

    Raises:
        QuadratureNotConverged: adaptive averaging failed at 1024 nodes.
    """
    seed = budget_to_seed(budget, purity)
    if noise.sigma == 0:
        return float(conditional_error(seed, 0.0))
    return quadrature.phase_average(lambda phi: conditional_error(seed, phi), noise.sigma, rule)


def converged_rule(budget: ChannelBudget, purity: float, noise: PhaseNoise) -> QuadratureRule:
    seed = budget_to_seed(budget, purity)
    return quadrature.adaptive_average(lambda phi: conditional_error(seed, phi), noise.sigma)[1]


_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

_ASYMPTOTICS = {
    "helstrom-cs": lambda n: 0.25 * math.exp(-4.0 * n),
    "helstrom-dss": lambda n: 0.25 * math.exp(-4.0 * n * (n + 1.0)),
    "homodyne-cs": lambda n: 0.25 * _SQRT_2_OVER_PI * math.exp(-2.0 * n) / math.sqrt(n),
    "homodyne-dss": lambda n: 0.25 * _SQRT_2_OVER_PI * math.exp(-2.0 * n * n) / n,
    "advantage-ratio": lambda n: -math.expm1(-4.0 * n * n),
}

ASYMPTOTIC_KINDS = tuple(_ASYMPTOTICS)


def asymptotic_error(kind: str, energy: float) -> float:
    """Large-N expressions; the "-dss" kinds assume the optimal squeezing fraction."""
    try:
        formula = _ASYMPTOTICS[kind]
    except KeyError:
        raise UnknownKind(f"unknown asymptotic kind {kind!r}; expected one of {ASYMPTOTIC_KINDS}")
    if energy <= 0:
        raise ValidationError(f"energy must be > 0, got {energy}")
    return formula(energy)
