import math

import numpy as np
import pytest
from scipy.special import erfc

from oracles import phase_averaged_error
from squeezepsk import fock
from squeezepsk.analysis import beta_closed_forms, helstrom_pure, helstrom_states
from squeezepsk.errors import UnknownKind, ValidationError
from squeezepsk.gaussian_core import ChannelBudget, budget_to_seed
from squeezepsk.receiver import (
    ASYMPTOTIC_KINDS,
    NOISELESS,
    PhaseNoise,
    asymptotic_error,
    error_probability,
    error_probability_pure,
)


@pytest.mark.parametrize(
    "energy, beta, expected",
    [
        (1.0, 0.0, 0.5 * erfc(math.sqrt(2))),
        (1.0, 1 / 3, 0.5 * erfc(2.0)),
        (0.0, 0.0, 0.5),
        (0.0, 1.0, 0.5),
    ],
)
def test_pure_examples(energy, beta, expected):
    assert error_probability_pure(ChannelBudget(energy, beta)) == pytest.approx(expected, abs=1e-15)


def test_pure_anchor_digits():
    assert error_probability_pure(ChannelBudget(1.0, 0.0)) == pytest.approx(2.2750e-2, abs=1e-6)
    assert error_probability_pure(ChannelBudget(1.0, 1 / 3)) == pytest.approx(2.3389e-3, abs=1e-7)


@pytest.mark.parametrize("energy", [0.1, 0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("frac", [0.0, 0.3, 0.7, 0.95])
def test_sigma_zero_reduction(energy, frac):
    budget = ChannelBudget(energy, frac * beta_closed_forms(energy)[0])
    assert error_probability(budget) == pytest.approx(error_probability_pure(budget), rel=1e-14)


def test_full_randomization():
    assert error_probability(ChannelBudget(1.0, 1 / 3), noise=PhaseNoise(50.0)) == pytest.approx(0.5, abs=1e-3)


def test_noise_validation():
    with pytest.raises(ValidationError):
        PhaseNoise(-0.1)
    assert PhaseNoise(0.4).delta == pytest.approx(0.08)


@pytest.mark.parametrize(
    "energy, beta, purity",
    [(1.0, 0.0, 1.0), (1.0, 1 / 3, 1.0), (2.0, 0.4, 1.0), (2.0, 0.2, 0.7), (0.5, 0.5, 0.9)],
)
def test_against_adaptive_oracle(energy, beta, purity):
    seed = budget_to_seed(ChannelBudget(energy, beta), purity)
    for sigma in (0.05, 0.2, 0.3, 0.8, 1.5):
        value = error_probability(ChannelBudget(energy, beta), purity, PhaseNoise(sigma))
        oracle = phase_averaged_error(seed.alpha, seed.squeezing, seed.thermal_photons, sigma)
        assert value == pytest.approx(oracle, abs=1e-10)


@pytest.mark.parametrize("energy, beta, purity", [(1.0, 1 / 3, 1.0), (2.0, 0.4, 1.0), (2.0, 0.3, 0.8)])
def test_monotone_in_sigma(energy, beta, purity):
    budget = ChannelBudget(energy, beta)
    values = [error_probability(budget, purity, PhaseNoise(s)) for s in np.linspace(0, 3, 31)]
    assert np.all(np.diff(values) >= -1e-12)
    assert all(0 < v <= 0.5 for v in values)


def test_zero_displacement_is_half():
    assert error_probability(ChannelBudget(1.0, 1.0), noise=PhaseNoise(0.3)) == pytest.approx(0.5, abs=1e-15)


def test_example_n2_beta_opt():
    budget = ChannelBudget(2.0, 0.4)
    value = error_probability(budget, noise=PhaseNoise(0.1))
    assert error_probability_pure(budget) < value < 0.5
    _, minus = helstrom_states(budget, noise=PhaseNoise(0.1))
    assert value == pytest.approx(fock.probability_x_nonnegative(minus), abs=1e-6)


@pytest.mark.parametrize("energy", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("sigma", [0.0, 0.2, 0.5, 1.0])
@pytest.mark.parametrize("purity", [1.0, 0.8])
def test_above_helstrom_and_matches_fock(energy, sigma, purity):
    beta_opt = beta_closed_forms(energy)[1]
    # impure seeds have less room for squeezing
    for beta in (0.0, beta_opt if purity == 1 else 0.5 * beta_opt):
        budget = ChannelBudget(energy, beta)
        noise = PhaseNoise(sigma)
        plus, minus = helstrom_states(budget, purity, noise)
        value = error_probability(budget, purity, noise)
        assert value >= fock.helstrom_mixed(plus, minus) - 1e-6
        assert value == pytest.approx(fock.probability_x_nonnegative(minus), abs=1e-8)


def test_asymptotic_examples():
    assert asymptotic_error("helstrom-cs", 3.0) == pytest.approx(0.25 * math.exp(-12), rel=1e-15)
    assert asymptotic_error("helstrom-cs", 3.0) == pytest.approx(1.5360e-6, abs=1e-10)
    assert asymptotic_error("advantage-ratio", 3.0) == pytest.approx(1.0, abs=1e-15)
    exact = helstrom_pure(ChannelBudget(3.0, 0.0))
    assert abs(exact / asymptotic_error("helstrom-cs", 3.0) - 1) < 0.5 * math.exp(-12)


@pytest.mark.parametrize("kind", ["helstrom-cs", "helstrom-dss", "homodyne-cs"])
@pytest.mark.parametrize("energy", [4.0, 6.0, 8.0])
def test_asymptotic_ratios(kind, energy):
    beta = 0.0 if kind.endswith("-cs") else beta_closed_forms(energy)[1]
    budget = ChannelBudget(energy, beta)
    exact = helstrom_pure(budget) if kind.startswith("helstrom") else error_probability_pure(budget)
    assert 0.9 <= exact / asymptotic_error(kind, energy) <= 1.1


@pytest.mark.parametrize("energy", [4.0, 6.0, 8.0])
def test_homodyne_dss_decay_rate(energy):
    # at beta_opt the exact exponent is 2N(N+1); the ratio to that form tends to one from below
    exact = error_probability_pure(ChannelBudget(energy, beta_closed_forms(energy)[1]))
    corrected = 0.25 * math.sqrt(2 / math.pi) * math.exp(-2 * energy * (energy + 1)) / energy
    assert 0.85 < exact / corrected < 1.0


def test_asymptotic_errors():
    with pytest.raises(UnknownKind):
        asymptotic_error("heterodyne", 1.0)
    with pytest.raises(ValidationError):
        asymptotic_error("helstrom-cs", 0.0)
    assert set(ASYMPTOTIC_KINDS) == {"helstrom-cs", "helstrom-dss", "homodyne-cs", "homodyne-dss", "advantage-ratio"}


def test_noiseless_constant():
    assert NOISELESS.sigma == 0.0
