"""Truncated number-basis states, phase diffusion and trace-distance bounds.

Everything here is deliberately independent of the Gaussian closed forms: the
states are built by exponentiating truncated ladder-operator generators, so
agreement with `gaussian_core` and `receiver` is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import roots_legendre

from .errors import CutoffExceeded, DimensionMismatch, UnitarityGuardFailed, ValidationError
from .gaussian_core import SeedState, photon_number_moments

UNITARITY_TOL = 1e-9
PSD_TOL = 1e-10


@dataclass(frozen=True)
class CutoffPolicy:
    target_tail: float = 1e-12
    hard_max: int = 512

    def __post_init__(self):
        if not 0.0 < self.target_tail < 1.0:
            raise ValidationError(f"target_tail must lie in (0, 1), got {self.target_tail}")
        if self.hard_max < 1:
            raise ValidationError(f"hard_max must be positive, got {self.hard_max}")


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix on span{|0>, ..., |n_max>}.

    ``tail`` is the probability mass lost to truncation, ``1 - Tr(rho)``.
    The matrix is never renormalized.
    """

    entries: np.ndarray
    tail: float = 0.0
    guard: float = field(default=0.0, compare=False)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def cutoff(self) -> int:
        return self.dimension - 1

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def _thermal_levels(n_th: float, tail: float) -> np.ndarray:
    """Geometric populations of nu(N_th), truncated so the dropped mass is < tail."""
    if n_th == 0:
        return np.ones(1)
    q = n_th / (1.0 + n_th)
    count = max(1, math.ceil(math.log(tail) / math.log(q)))
    return (1.0 - q) * q ** np.arange(count)


def _initial_cutoff(seed: SeedState) -> int:
    mean, variance = photon_number_moments(seed)
    return math.ceil(mean + 10.0 * math.sqrt(variance) + 20.0)


def seed_unitary(alpha: float, squeezing: float, dim: int) -> np.ndarray:
    """Truncated D(alpha) S(r) on a `dim`-level space (real orthogonal for real inputs)."""
    a = annihilation(dim)
    ad = a.T
    # S(r) = exp[r (a^2 - a^dag^2) / 2] squeezes x = a + a^dag
    u = expm(0.5 * squeezing * (a @ a - ad @ ad)) if squeezing else np.eye(dim)
    if alpha:
        u = expm(alpha * (ad - a)) @ u
    return u


def build_state(seed: SeedState, sign: int = 1, cutoff: CutoffPolicy = CutoffPolicy()) -> FockDensityMatrix:
    """Fock matrix of D(sign*alpha) S(r) nu(N_th) S^dag(r) D^dag(sign*alpha).

    The operators act on a working space twice the size of the kept block, so
    the boundary of the truncated generators stays far from every retained
    amplitude. The kept block grows until its tail mass is below
    ``cutoff.target_tail`` and the relevant columns of the cropped unitary are
    orthonormal to ``UNITARITY_TOL``.

    Raises:
        CutoffExceeded: ``cutoff.hard_max`` levels cannot hold the state.
        UnitarityGuardFailed: columns leak out of the kept block at ``hard_max``.
    """
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    levels = _thermal_levels(seed.thermal_photons, 0.1 * cutoff.target_tail)
    n_max = min(max(_initial_cutoff(seed), len(levels)), cutoff.hard_max)
    while True:
        keep = n_max + 1
        work = max(2 * keep, len(levels) + keep)
        u = seed_unitary(sign * seed.alpha, seed.squeezing, work)[:, : len(levels)]
        rho = (u * levels) @ u.T
        rho = 0.5 * (rho[:keep, :keep] + rho[:keep, :keep].T)
        tail = 1.0 - float(np.trace(rho))
        block = u[:keep]
        guard = float(np.max(np.abs(block.T @ block - np.eye(len(levels)))))
        if tail < cutoff.target_tail and guard < UNITARITY_TOL:
            return FockDensityMatrix(rho, tail=max(tail, 0.0), guard=guard)
        if n_max >= cutoff.hard_max:
            if tail >= cutoff.target_tail:
                raise CutoffExceeded(
                    f"tail mass {tail:.3g} >= {cutoff.target_tail:.3g} at n_max = {n_max}"
                )
            raise UnitarityGuardFailed(f"unitarity defect {guard:.3g} at n_max = {n_max}")
        n_max = min(2 * n_max, cutoff.hard_max)


def fock_vector_state(amplitudes: np.ndarray) -> FockDensityMatrix:
    """Pure state from (not necessarily normalized-to-one) Fock amplitudes."""
    psi = np.asarray(amplitudes)
    rho = np.outer(psi, psi.conj())
    return FockDensityMatrix(rho, tail=max(0.0, 1.0 - float(np.real(np.trace(rho)))))


def dephasing_factors(dim: int, sigma: float) -> np.ndarray:
    n = np.arange(dim)
    return np.exp(-0.5 * sigma**2 * (n[:, None] - n[None, :]) ** 2)


def dephase(rho: FockDensityMatrix, sigma: float) -> FockDensityMatrix:
    """Gaussian phase diffusion: rho_nm -> exp(-(n-m)^2 sigma^2 / 2) rho_nm."""
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return rho
    return FockDensityMatrix(
        rho.entries * dephasing_factors(rho.dimension, sigma), tail=rho.tail, guard=rho.guard
    )


def rotate(rho: FockDensityMatrix, phase: float) -> FockDensityMatrix:
    """U_phi rho U_phi^dag with U_phi = exp(-i phase a^dag a)."""
    u = np.exp(-1j * phase * np.arange(rho.dimension))
    return FockDensityMatrix(u[:, None] * rho.entries * u.conj()[None, :], tail=rho.tail)


def trace_distance(rho1: FockDensityMatrix, rho2: FockDensityMatrix) -> float:
    """D = (1/2) sum |eigenvalues of rho1 - rho2|."""
    if rho1.dimension != rho2.dimension:
        raise DimensionMismatch(f"dimensions differ: {rho1.dimension} vs {rho2.dimension}")
    diff = rho1.entries - rho2.entries
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def helstrom_mixed(rho1: FockDensityMatrix, rho2: FockDensityMatrix) -> float:
    """Minimum error probability for equiprobable rho1, rho2."""
    return 0.5 * (1.0 - trace_distance(rho1, rho2))


def pad_to_common(rho1: FockDensityMatrix, rho2: FockDensityMatrix):
    """Zero-pad the smaller matrix so both live on the same truncated space."""
    dim = max(rho1.dimension, rho2.dimension)

    def pad(rho):
        if rho.dimension == dim:
            return rho
        out = np.zeros((dim, dim), dtype=rho.entries.dtype)
        out[: rho.dimension, : rho.dimension] = rho.entries
        return FockDensityMatrix(out, tail=rho.tail, guard=rho.guard)

    return pad(rho1), pad(rho2)


def number_wavefunctions(dim: int, x) -> np.ndarray:
    """psi_n(x) for n < dim on the x = a + a^dag scale, shape (dim, len(x)).

    Uses the normalized three-term recurrence
    ``psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.empty((dim, x.size))
    psi[0] = (2.0 * math.pi) ** -0.25 * np.exp(-0.25 * x * x)
    if dim > 1:
        psi[1] = x * psi[0]
    for n in range(1, dim - 1):
        psi[n + 1] = (x * psi[n] - math.sqrt(n) * psi[n - 1]) / math.sqrt(n + 1)
    return psi


def homodyne_pdf_fock(rho: FockDensityMatrix, x):
    """Density of the x_0 homodyne outcome, sum_nm psi_n(x) psi_m(x) rho_nm."""
    psi = number_wavefunctions(rho.dimension, x)
    pdf = np.real(np.einsum("nx,nm,mx->x", psi, rho.entries, psi))
    return float(pdf[0]) if np.ndim(x) == 0 else pdf


def half_line_overlaps(dim: int) -> np.ndarray:
    """M_nm = integral over x >= 0 of psi_n psi_m.

    Entries with n + m even are exactly delta_nm / 2 by parity; the rest come
    from Gauss-Legendre quadrature over [0, L] with L beyond the classical
    turning point of the highest level.
    """
    length = 2.0 * math.sqrt(2.0 * dim + 1.0) + 12.0
    nodes, weights = roots_legendre(max(256, 6 * dim))
    x = 0.5 * length * (nodes + 1.0)
    w = 0.5 * length * weights
    psi = number_wavefunctions(dim, x)
    overlaps = (psi * w) @ psi.T
    n = np.arange(dim)
    even = (n[:, None] + n[None, :]) % 2 == 0
    overlaps[even] = 0.0
    overlaps[np.diag_indices(dim)] = 0.5
    return overlaps


def probability_x_nonnegative(rho: FockDensityMatrix) -> float:
    """P(x >= 0) from the Fock matrix."""
    overlaps = half_line_overlaps(rho.dimension)
    return float(np.real(np.sum(overlaps * rho.entries.T)))


def quadrature_moments(rho: FockDensityMatrix, phase: float = 0.0) -> tuple[float, float]:
    """Mean and variance of x_phase = a exp(-i phase) + a^dag exp(i phase)."""
    a = annihilation(rho.dimension)
    x = a * np.exp(-1j * phase) + a.T * np.exp(1j * phase)
    mean = float(np.real(np.trace(rho.entries @ x)))
    second = float(np.real(np.trace(rho.entries @ x @ x)))
    return mean, second - mean * mean


def purity(rho: FockDensityMatrix) -> float:
    return float(np.real(np.sum(rho.entries * rho.entries.conj())))
