"""Helstrom bounds, squeezing/noise thresholds and the small-squeezing slope."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from . import fock, quadrature
from .errors import BracketingFailed, ValidationError
from .fock import CutoffPolicy, FockDensityMatrix
from .gaussian_core import ChannelBudget, budget_to_seed, check_purity, max_squeezing_fraction
from .quadrature import QuadratureRule
from .receiver import NOISELESS, PhaseNoise, conditional_error, error_probability

ROOT_XTOL = 1e-9
METRICS = ("helstrom", "homodyne")

SLOPE_BETA = 1e-6
SLOPE_STEP = 1e-7
# the difference quotient has a round-off floor near 1e-10
SLOPE_TOL = 1e-8
SIGMA_SCAN_MAX = 5.0
SIGMA_SCAN_STEP = 0.05


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    bracket: tuple[float, float]
    iterations: int
    metric: str
    residual: float = 0.0
    advantage: bool = True


def _helstrom_from_overlap(overlap_sq: float) -> float:
    # (1 - sqrt(1 - x)) / 2 without cancellation for small x
    return 0.5 * overlap_sq / (1.0 + math.sqrt(1.0 - overlap_sq))


def helstrom_pure(budget: ChannelBudget) -> float:
    n, beta = budget.energy, budget.squeezing_fraction
    nb = n * beta
    exponent = 4.0 * n * (1.0 - beta) * (1.0 + 2.0 * nb + 2.0 * math.sqrt(nb * (1.0 + nb)))
    return _helstrom_from_overlap(math.exp(-exponent))


def helstrom_seed(alpha: float, squeezing: float) -> float:
    """Helstrom bound for |+-alpha, r> in terms of the displacement and squeezing."""
    return _helstrom_from_overlap(math.exp(-4.0 * alpha**2 * math.exp(2.0 * squeezing)))


def beta_closed_forms(energy: float) -> tuple[float, float]:
    """(beta_th, beta_opt) for the noiseless, pure channel."""
    if energy <= 0:
        raise ValidationError(f"energy must be > 0, got {energy}")
    return 4.0 * energy / (4.0 * energy + 1.0), energy / (2.0 * energy + 1.0)


def helstrom_states(
    budget: ChannelBudget,
    purity: float = 1.0,
    noise: PhaseNoise = NOISELESS,
    cutoff: CutoffPolicy = CutoffPolicy(),
) -> tuple[FockDensityMatrix, FockDensityMatrix]:
    """Dephased Fock matrices of the "+" and "-" symbols."""
    seed = budget_to_seed(budget, purity)
    plus = fock.dephase(fock.build_state(seed, +1, cutoff), noise.sigma)
    parity = (-1.0) ** np.arange(plus.dimension)
    # D(-alpha) S(r) = P D(alpha) S(r) P with P the photon-number parity
    minus = FockDensityMatrix(
        plus.entries * np.outer(parity, parity), tail=plus.tail, guard=plus.guard
    )
    return plus, minus


def helstrom_noisy(
    budget: ChannelBudget,
    purity: float = 1.0,
    noise: PhaseNoise = NOISELESS,
    cutoff: CutoffPolicy = CutoffPolicy(),
) -> float:
    """Helstrom bound for the mixed symbols, via the Fock-space trace distance."""
    return fock.helstrom_mixed(*helstrom_states(budget, purity, noise, cutoff))


def _beta_grid(beta_max: float) -> np.ndarray:
    fractions = np.concatenate([np.geomspace(1e-6, 1e-2, 13), np.linspace(0.01, 1.0, 100)])
    return np.unique(beta_max * fractions)


def _largest_crossing(
    func: Callable[[float], float], grid: np.ndarray, metric: str, unbounded_ok: bool = False
) -> ThresholdResult:
    """Largest x where func changes from negative to non-negative along `grid`."""
    values = np.array([func(x) for x in grid])
    negative = np.flatnonzero(values < 0)
    if negative.size == 0:
        return ThresholdResult(0.0, (0.0, float(grid[0])), 0, metric, advantage=False)
    i = negative[-1]
    if i == len(grid) - 1:
        if unbounded_ok:
            return ThresholdResult(math.inf, (float(grid[-1]), math.inf), 0, metric)
        raise BracketingFailed(
            f"advantage persists up to the end of the scan ({grid[-1]:.6g}); no upper crossing"
        )
    lo, hi = float(grid[i]), float(grid[i + 1])
    root, info = bisect(func, lo, hi, xtol=ROOT_XTOL, full_output=True)
    half = 0.5 * ROOT_XTOL
    bracket = (max(lo, root - half), min(hi, root + half))
    return ThresholdResult(root, bracket, info.iterations, metric, residual=abs(func(root)))


def beta_threshold_numeric(
    energy: float,
    noise: PhaseNoise = NOISELESS,
    purity: float = 1.0,
    metric: str = "homodyne",
    cutoff: CutoffPolicy = CutoffPolicy(),
) -> ThresholdResult:
    """Largest squeezing fraction at which DSSs still match coherent states.

    Scans P(beta) - P(0) over the admissible beta range, then bisects the last
    sign change. Returns value 0 with ``advantage=False`` when squeezing never
    helps.
    """
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}, got {metric!r}")
    if energy <= 0:
        raise ValidationError(f"energy must be > 0, got {energy}")
    check_purity(purity, energy)
    beta_max = max_squeezing_fraction(energy, purity)
    grid = _beta_grid(beta_max)

    if metric == "helstrom":
        if noise.sigma == 0 and purity == 1.0:
            def prob(beta):
                return helstrom_pure(ChannelBudget(energy, beta))
        else:
            def prob(beta):
                return helstrom_noisy(ChannelBudget(energy, beta), purity, noise, cutoff)
    elif noise.sigma == 0:
        def prob(beta):
            return error_probability(ChannelBudget(energy, beta), purity)
    else:
        # one rule for every beta keeps P(beta) smooth across the bisection
        rule = _common_rule(energy, purity, noise, grid)

        def prob(beta):
            return error_probability(ChannelBudget(energy, beta), purity, noise, rule)

    reference = prob(0.0)
    return _largest_crossing(lambda beta: prob(beta) - reference, grid, metric)


def _common_rule(energy, purity, noise, grid) -> QuadratureRule:
    size = quadrature.NODE_COUNTS[0]
    for beta in np.concatenate([[0.0], grid]):
        seed = budget_to_seed(ChannelBudget(energy, min(beta, 1.0)), purity)
        _, rule = quadrature.adaptive_average(lambda phi: conditional_error(seed, phi), noise.sigma)
        size = max(size, rule.size)
    return quadrature.phase_rule(size, noise.sigma)


def _g_integrand(energy: float):
    def integrand(phi):
        c = np.cos(phi)
        return np.exp(-2.0 * energy * c * c) * np.cos(2.0 * phi) * c / math.sqrt(math.pi)

    return integrand


def g_function(energy: float, sigma: float, rule: QuadratureRule | None = None) -> float:
    """Phase-averaged first-order coefficient of the small-squeezing expansion.

    Positive values mean a little squeezing lowers the homodyne error
    probability of a pure seed.
    """
    if energy <= 0:
        raise ValidationError(f"energy must be > 0, got {energy}")
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    return quadrature.phase_average(_g_integrand(energy), sigma, rule)


def small_beta_slope(
    energy: float,
    sigma: float,
    purity: float = 1.0,
    beta: float = SLOPE_BETA,
    step: float = SLOPE_STEP,
) -> float:
    """Central difference of the homodyne error probability in sqrt(beta).

    The difference quotient is formed inside the phase integral so both
    evaluations share the same nodes.
    """
    root = math.sqrt(beta)
    lo = budget_to_seed(ChannelBudget(energy, (root - step) ** 2), purity)
    hi = budget_to_seed(ChannelBudget(energy, (root + step) ** 2), purity)

    def quotient(phi):
        return (conditional_error(hi, phi) - conditional_error(lo, phi)) / (2.0 * step)

    if sigma == 0:
        return float(quotient(0.0))
    return quadrature.phase_average(quotient, sigma, tol=SLOPE_TOL)


def limiting_slope(energy: float, sigma: float, purity: float = 1.0) -> float:
    """beta -> 0 limit of `small_beta_slope`, by one Richardson step in sqrt(beta).

    The raw difference at beta = 1e-6 carries an O(sqrt(beta)) bias of a few
    parts per thousand, enough to move its zero in sigma by ~1e-3.
    """
    near = small_beta_slope(energy, sigma, purity, SLOPE_BETA)
    far = small_beta_slope(energy, sigma, purity, 4.0 * SLOPE_BETA)
    return 2.0 * near - far


def sigma_threshold(energy: float, purity: float = 1.0, route: str = "auto") -> ThresholdResult:
    """Largest phase-noise strength at which a little squeezing still helps.

    ``route="g"`` bisects the zero of `g_function` (pure seeds only);
    ``route="slope"`` bisects the zero of `limiting_slope`. ``"auto"`` picks
    the first for ``purity == 1`` and the second otherwise.

    Returns ``value=inf`` when squeezing still helps at the end of the scan.
    Past sigma = 5 only the first phase harmonic of either integrand survives
    (the next one is weaker by exp(-4 sigma^2)), so the sign seen there holds
    for every larger sigma.
    """
    if energy <= 0:
        raise ValidationError(f"energy must be > 0, got {energy}")
    check_purity(purity, energy)
    if route == "auto":
        route = "g" if purity == 1.0 else "slope"
    if route == "g":
        if purity != 1.0:
            raise ValidationError("the g-function route requires purity == 1")

        def benefit(sigma):
            return g_function(energy, sigma)
    elif route == "slope":
        def benefit(sigma):
            return -limiting_slope(energy, sigma, purity)
    else:
        raise ValidationError(f"route must be 'auto', 'g' or 'slope', got {route!r}")

    steps = round(SIGMA_SCAN_MAX / SIGMA_SCAN_STEP)
    grid = SIGMA_SCAN_STEP * np.arange(steps + 1)
    # benefit > 0 is the advantage region, so cross on -benefit
    return _largest_crossing(lambda s: -benefit(s), grid, "homodyne", unbounded_ok=True)
