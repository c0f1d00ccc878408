import json
import math

import numpy as np
import pytest

from squeezepsk.analysis import beta_threshold_numeric, g_function, helstrom_noisy, helstrom_pure, sigma_threshold
from squeezepsk.errors import UnknownKind, ValidationError
from squeezepsk.gaussian_core import ChannelBudget
from squeezepsk.receiver import PhaseNoise, error_probability, error_probability_pure
from squeezepsk.scans import FIGURES, ScanSettings, ScanTable, read_csv, scan_axes, scan_figure, to_csv, to_json

SMALL = ScanSettings(
    betas=(0.0, 1 / 3, 0.5),
    energies=(0.5, 1.0),
    noise_family=(0.1, 0.5),
    threshold_energies=(1.0,),
    threshold_sigmas=(0.0, 0.3),
    fig3_energies=(1.0, 2.0),
    fig3_sigmas=(0.0, 0.2, 1.0),
    fig4_energy=2.0,
    purities=(0.5, 1.0),
    fig5_energies=(1.0, 2.0),
    g_sigmas=(0.0, 0.5),
)


@pytest.fixture(scope="module")
def small_tables():
    return {figure: scan_figure(figure, SMALL) for figure in FIGURES}


@pytest.mark.parametrize("figure", FIGURES)
def test_value_count_is_grid_product(small_tables, figure):
    table = small_tables[figure]
    assert table.values.shape == table.shape + (len(table.value_names),)
    assert math.prod(table.shape) == math.prod(len(g) for g in table.axis_grids)
    assert len(list(table.rows())) == math.prod(table.shape)


@pytest.mark.parametrize("figure", FIGURES)
def test_csv_round_trip_is_bit_exact(small_tables, figure):
    table = small_tables[figure]
    back = read_csv(to_csv(table))
    assert back.axis_names == table.axis_names
    assert back.value_names == table.value_names
    np.testing.assert_array_equal(back.values, table.values)
    for g1, g2 in zip(back.axis_grids, table.axis_grids):
        np.testing.assert_array_equal(g1, g2)
    assert back.metadata["figure"] == figure


def test_csv_spot_checks_against_direct_calls(small_tables):
    fig1 = read_csv(to_csv(small_tables["fig1-left"]))
    assert fig1.lookup(beta=1 / 3, energy=1.0)["p_helstrom"] == helstrom_pure(ChannelBudget(1.0, 1 / 3))
    fig1r = read_csv(to_csv(small_tables["fig1-right"]))
    assert fig1r.lookup(beta=0.0, energy=0.5)["p_homodyne"] == error_probability_pure(ChannelBudget(0.5, 0.0))
    fig2 = read_csv(to_csv(small_tables["fig2-left"]))
    direct = error_probability(ChannelBudget(1.0, 0.5), noise=PhaseNoise(0.5))
    assert fig2.lookup(sigma=0.5, beta=0.5, energy=1.0)["p_homodyne"] == direct
    fig2r = read_csv(to_csv(small_tables["fig2-right"]))
    assert fig2r.lookup(energy=1.0, sigma=0.3)["beta_th"] == beta_threshold_numeric(1.0, PhaseNoise(0.3)).value
    fig3 = read_csv(to_csv(small_tables["fig3"]))
    helstrom = helstrom_noisy(ChannelBudget(1.0, 1 / 3), noise=PhaseNoise(0.2))
    assert fig3.lookup(energy=1.0, sigma=0.2)["p_helstrom_dss"] == pytest.approx(helstrom, abs=1e-14)
    fig5 = read_csv(to_csv(small_tables["fig5-left"]))
    assert fig5.lookup(energy=2.0, purity=1.0)["sigma_th"] == sigma_threshold(2.0).value
    fig5r = read_csv(to_csv(small_tables["fig5-right"]))
    assert fig5r.lookup(energy=2.0, sigma=0.5)["g"] == g_function(2.0, 0.5)


def test_documented_grid_points(small_tables):
    assert small_tables["fig1-left"].lookup(beta=0.0, energy=1.0)["p_helstrom"] == pytest.approx(4.60007037e-3, abs=1e-10)
    row = small_tables["fig3"].lookup(energy=1.0, sigma=0.0)
    assert row["p_homodyne_dss"] == pytest.approx(2.33887e-3, abs=1e-8)
    assert row["p_helstrom_dss"] == pytest.approx(8.3873e-5, abs=1e-9)
    assert small_tables["fig2-right"].lookup(energy=1.0, sigma=0.0)["beta_th"] == pytest.approx(0.8, abs=1e-6)


def test_inadmissible_points_are_nan(small_tables):
    fig4 = small_tables["fig4-left"]
    assert math.isnan(fig4.lookup(sigma=0.1, beta=0.5, purity=0.5)["p_homodyne"])
    assert math.isfinite(fig4.lookup(sigma=0.1, beta=0.0, purity=0.5)["p_homodyne"])


def test_fig3_metadata(small_tables):
    meta = small_tables["fig3"].metadata
    assert meta["cutoff_used"] > 0
    assert meta["tolerances"]["cutoff_target_tail"] == 1e-12
    assert small_tables["fig3"].value_names == ("p_homodyne_dss", "p_helstrom_dss", "p_homodyne_cs", "p_helstrom_cs")


def test_repeated_runs_are_byte_identical():
    first = to_csv(scan_figure("fig3", SMALL)) + to_json(scan_figure("fig5-left", SMALL))
    second = to_csv(scan_figure("fig3", SMALL)) + to_json(scan_figure("fig5-left", SMALL))
    assert first == second


def test_json_mirrors_table(small_tables):
    table = small_tables["fig5-left"]
    payload = json.loads(to_json(table))
    assert payload["axis_names"] == list(table.axis_names)
    assert payload["value_names"] == list(table.value_names)
    values = np.array(payload["values"], dtype=float)
    np.testing.assert_array_equal(values, table.values)


def test_nonfinite_formatting():
    table = ScanTable(("energy",), ([1.0, 2.0],), ("sigma_th",), [[math.inf], [math.nan]])
    text = to_csv(table)
    assert "1,inf" in text and "2,nan" in text
    back = read_csv(text)
    assert math.isinf(back.values[0, 0]) and math.isnan(back.values[1, 0])


def test_scan_axes_matches_direct_calls():
    table = scan_axes("homodyne", {"beta": [0.0, 0.2], "sigma": [0.0, 0.4]}, {"energy": 1.0})
    assert table.lookup(beta=0.2, sigma=0.4)["homodyne"] == error_probability(ChannelBudget(1.0, 0.2), noise=PhaseNoise(0.4))
    helstrom = scan_axes("helstrom", {"sigma": [0.3]}, {"energy": 1.0, "beta": 0.2})
    assert helstrom.values[0, 0] == helstrom_noisy(ChannelBudget(1.0, 0.2), noise=PhaseNoise(0.3))
    assert helstrom.metadata["cutoff_used"] > 0


def test_scan_errors():
    with pytest.raises(UnknownKind):
        scan_figure("fig9")
    with pytest.raises(UnknownKind):
        scan_axes("fidelity", {"energy": [1.0]})
    with pytest.raises(ValidationError):
        scan_axes("g", {"temperature": [1.0]})


@pytest.mark.slow
def test_default_fig3_grid():
    table = scan_figure("fig3")
    assert table.shape == (2, 31)
    hom = table.values[..., [0, 2]]
    hel = table.values[..., [1, 3]]
    assert np.all(hom >= hel - 1e-6)
