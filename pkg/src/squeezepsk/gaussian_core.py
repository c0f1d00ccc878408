"""Signal-state parameterization for binary PSK with displaced squeezed states.

Quadratures follow ``x_theta = a exp(-i theta) + a^dag exp(i theta)`` so the
vacuum variance is 1 and ``|alpha, r>`` with real ``alpha, r > 0`` has
``<x_0> = 2 alpha`` and ``Var(x_0) = exp(-2 r)`` (squeezed along x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EnergyBudgetExceeded, InvalidPurity, InvalidTransmissivity, ValidationError

# Relative slack when clipping round-off in the displacement energy.
_ENERGY_SLACK = 1e-12


@dataclass(frozen=True)
class ChannelBudget:
    """Mean photon number of each symbol and the share of it spent on squeezing."""

    energy: float
    squeezing_fraction: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.energy) or self.energy < 0:
            raise ValidationError(f"energy must be >= 0, got {self.energy}")
        if not 0.0 <= self.squeezing_fraction <= 1.0:
            raise ValidationError(
                f"squeezing_fraction must lie in [0, 1], got {self.squeezing_fraction}"
            )

    @property
    def squeezing_photons(self) -> float:
        return self.energy * self.squeezing_fraction


@dataclass(frozen=True)
class SeedState:
    """Displaced squeezed thermal state D(alpha) S(r) nu(N_th) S^dag(r) D^dag(alpha)."""

    alpha: float
    squeezing: float = 0.0
    thermal_photons: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.squeezing < 0 or self.thermal_photons < 0:
            raise ValidationError(f"seed parameters must be non-negative: {self}")

    @property
    def purity(self) -> float:
        return 1.0 / (2.0 * self.thermal_photons + 1.0)

    @classmethod
    def from_purity(cls, alpha: float, squeezing: float, purity: float) -> "SeedState":
        if not 0.0 < purity <= 1.0:
            raise InvalidPurity(f"purity must lie in (0, 1], got {purity}")
        return cls(alpha, squeezing, thermal_photons_of(purity))


@dataclass(frozen=True)
class LossyPreparation:
    """Pure squeezed vacuum S(r_tilde)|0> sent through a channel of transmissivity eta."""

    initial_squeezing: float
    transmissivity: float

    def __post_init__(self):
        if not 0.0 < self.transmissivity <= 1.0:
            raise InvalidTransmissivity(
                f"transmissivity must lie in (0, 1], got {self.transmissivity}"
            )


@dataclass(frozen=True)
class QuadratureStats:
    mean: float
    variance: float


def thermal_photons_of(purity: float) -> float:
    return (1.0 - purity) / (2.0 * purity)


def min_purity(energy: float) -> float:
    """Lower purity limit 1/(1+2N): below it the thermal part alone exceeds the budget."""
    return 1.0 / (1.0 + 2.0 * energy)


def check_purity(purity: float, energy: float) -> None:
    if not 0.0 < purity <= 1.0:
        raise InvalidPurity(f"purity must lie in (0, 1], got {purity}")
    if purity < 1.0 and purity <= min_purity(energy):
        raise InvalidPurity(
            f"purity {purity} is not above 1/(1+2N) = {min_purity(energy)} for N = {energy}"
        )


def displacement_energy(budget: ChannelBudget, purity: float = 1.0) -> float:
    """alpha^2 left after squeezing and thermal photons; may be negative."""
    n_sq = budget.squeezing_photons
    return budget.energy - n_sq - thermal_photons_of(purity) * (1.0 + 2.0 * n_sq)


def max_squeezing_fraction(energy: float, purity: float = 1.0) -> float:
    """Largest beta for which the displacement energy stays non-negative."""
    if energy == 0:
        return 1.0
    n_th = thermal_photons_of(purity)
    return min(1.0, (energy - n_th) / (energy * (1.0 + 2.0 * n_th)))


def budget_to_seed(budget: ChannelBudget, purity: float = 1.0) -> SeedState:
    """Split the channel energy into squeezing, thermal noise and displacement.

    Raises:
        InvalidPurity: purity outside ``((1 + 2N)^-1, 1]``.
        EnergyBudgetExceeded: squeezing plus thermal photons exceed ``N``.
    """
    check_purity(purity, budget.energy)
    alpha_sq = displacement_energy(budget, purity)
    if alpha_sq < 0:
        if alpha_sq < -_ENERGY_SLACK * max(budget.energy, 1.0):
            raise EnergyBudgetExceeded(
                f"no energy left for displacement: alpha^2 = {alpha_sq:.6g} "
                f"(N={budget.energy}, beta={budget.squeezing_fraction}, purity={purity})"
            )
        alpha_sq = 0.0
    return SeedState(
        alpha=math.sqrt(alpha_sq),
        squeezing=math.asinh(math.sqrt(budget.squeezing_photons)),
        thermal_photons=thermal_photons_of(purity),
    )


def energy_of(seed: SeedState) -> float:
    n_th = seed.thermal_photons
    return seed.alpha**2 + (2.0 * n_th + 1.0) * math.sinh(seed.squeezing) ** 2 + n_th


def squeezing_fraction_of(seed: SeedState) -> float:
    energy = energy_of(seed)
    return 0.0 if energy == 0 else math.sinh(seed.squeezing) ** 2 / energy


def loss_map(prep: LossyPreparation) -> tuple[float, float]:
    """Purity and squeezing of a squeezed vacuum after a lossy channel.

    The output is again a squeezed thermal state; its quadrature variances are
    ``eta exp(-+2 r_tilde) + 1 - eta``. Returns ``(purity, r)`` with
    ``purity = 1 / sqrt(V_x V_p)`` and ``exp(2r) = sqrt(V_p / V_x)``.
    """
    e2 = math.exp(2.0 * prep.initial_squeezing)
    eta = prep.transmissivity
    low = eta + (1.0 - eta) * e2  # = e2 * V_x
    high = 1.0 + eta * (e2 - 1.0)  # = V_p
    purity = math.sqrt(e2 / (low * high))
    squeezing = 0.5 * (prep.initial_squeezing + 0.5 * math.log(high / low))
    return min(purity, 1.0), squeezing


def rotated_quadrature_stats(seed: SeedState, phase: float, sign: int = 1) -> QuadratureStats:
    """Mean and variance of x_0 for ``U_phi D(sign*alpha) S(r) nu S^dag D^dag U_phi^dag``."""
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    c, s = math.cos(phase), math.sin(phase)
    r = seed.squeezing
    variance = (2.0 * seed.thermal_photons + 1.0) * (
        math.exp(-2.0 * r) * c * c + math.exp(2.0 * r) * s * s
    )
    return QuadratureStats(mean=sign * 2.0 * seed.alpha * c, variance=variance)


def photon_number_moments(seed: SeedState) -> tuple[float, float]:
    """Mean and variance of a^dag a for the displaced squeezed thermal state."""
    nu = 2.0 * seed.thermal_photons + 1.0
    vx, vp = nu * math.exp(-2.0 * seed.squeezing), nu * math.exp(2.0 * seed.squeezing)
    mean = energy_of(seed)
    # Var(n) = (Tr V^2 + 2 d^T V d - 2) / 8 with d = (2 alpha, 0)
    variance = (vx * vx + vp * vp + 2.0 * 4.0 * seed.alpha**2 * vx - 2.0) / 8.0
    return mean, max(variance, 0.0)
