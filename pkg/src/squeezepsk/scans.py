"""Labeled parameter grids behind each figure, plus CSV/JSON emitters."""

from __future__ import annotations

import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__, fock, quadrature
from .analysis import (
    ROOT_XTOL,
    beta_closed_forms,
    beta_threshold_numeric,
    g_function,
    helstrom_pure,
    helstrom_states,
    sigma_threshold,
)
from .errors import EnergyBudgetExceeded, InvalidPurity, UnknownKind, ValidationError
from .fock import CutoffPolicy
from .gaussian_core import ChannelBudget, min_purity
from .receiver import PhaseNoise, error_probability, error_probability_pure


@dataclass
class ScanTable:
    """Values on the product of `axis_grids`, one column per name in `value_names`."""

    axis_names: tuple[str, ...]
    axis_grids: tuple[np.ndarray, ...]
    value_names: tuple[str, ...]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis_grids = tuple(np.asarray(g, dtype=float) for g in self.axis_grids)
        shape = tuple(len(g) for g in self.axis_grids) + (len(self.value_names),)
        self.values = np.asarray(self.values, dtype=float).reshape(shape)
        if len(self.axis_names) != len(self.axis_grids):
            raise ValidationError("axis_names and axis_grids differ in length")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape[:-1]

    def rows(self):
        """(axis values, column values) for every grid point in C order."""
        for index in itertools.product(*(range(n) for n in self.shape)):
            point = tuple(float(g[i]) for g, i in zip(self.axis_grids, index))
            yield point, tuple(float(v) for v in self.values[index])

    def lookup(self, **coords) -> dict[str, float]:
        index = []
        for name, grid in zip(self.axis_names, self.axis_grids):
            hits = np.flatnonzero(grid == coords[name])
            if hits.size == 0:
                raise KeyError(f"{name}={coords[name]} not on the grid")
            index.append(hits[0])
        return dict(zip(self.value_names, self.values[tuple(index)].tolist()))


def format_number(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_number(x: float):
    return float(x) if math.isfinite(x) else format_number(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _json_number(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_csv(table: ScanTable) -> str:
    out = io.StringIO()
    meta = {**table.metadata, "axis_names": list(table.axis_names)}
    for key in sorted(meta):
        out.write(f"# {key}: {json.dumps(_jsonable(meta[key]), sort_keys=True)}\n")
    out.write(",".join(table.axis_names + table.value_names) + "\n")
    for point, values in table.rows():
        out.write(",".join(format_number(x) for x in point + values) + "\n")
    return out.getvalue()


def to_json(table: ScanTable) -> str:
    payload = {
        "axis_names": list(table.axis_names),
        "axis_grids": [g.tolist() for g in table.axis_grids],
        "value_names": list(table.value_names),
        "values": table.values.tolist(),
        "metadata": table.metadata,
    }
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def read_csv(text: str) -> ScanTable:
    """Inverse of `to_csv` (metadata values come back JSON-decoded)."""
    metadata, lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = json.loads(value)
        elif line:
            lines.append(line)
    header = lines[0].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]]).reshape(
        len(lines) - 1, len(header)
    )
    axis_names = tuple(metadata.pop("axis_names"))
    n_axes = len(axis_names)
    grids = tuple(np.array(sorted(set(data[:, i]), key=list(data[:, i]).index)) for i in range(n_axes))
    return ScanTable(axis_names, grids, tuple(header[n_axes:]), data[:, n_axes:], metadata)


# -- figure definitions ------------------------------------------------------

FIGURES = (
    "fig1-left",
    "fig1-right",
    "fig2-left",
    "fig2-right",
    "fig3",
    "fig4-left",
    "fig4-right",
    "fig5-left",
    "fig5-right",
)


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    count = round((stop - start) / step)
    return np.round(start + step * np.arange(count + 1), 12)


@dataclass(frozen=True)
class ScanSettings:
    betas: tuple = tuple(_grid(0.0, 1.0, 0.02))
    energies: tuple = tuple(_grid(0.1, 2.0, 0.1))
    noise_family: tuple = (0.1, 0.3, 0.5, 1.0)
    threshold_energies: tuple = (0.5, 1.0, 2.0)
    threshold_sigmas: tuple = tuple(_grid(0.0, 1.5, 0.05))
    fig3_energies: tuple = (1.0, 2.0)
    fig3_sigmas: tuple = tuple(_grid(0.0, 1.5, 0.05))
    fig4_energy: float = 2.0
    purities: tuple = tuple(_grid(0.05, 1.0, 0.05))
    fig5_energies: tuple = (1.0, 2.0, 3.0, 5.0)
    g_sigmas: tuple = tuple(_grid(0.0, 3.0, 0.02))
    cutoff: CutoffPolicy = CutoffPolicy()


class _Tracker:
    """Collects the largest Fock cutoff used while filling a table."""

    def __init__(self):
        self.cutoff_used = None

    def note(self, rho):
        self.cutoff_used = max(self.cutoff_used or 0, rho.cutoff)


def _fill(axes: dict[str, tuple], value_names, func: Callable[..., tuple]) -> tuple:
    names = tuple(axes)
    grids = tuple(np.asarray(axes[n], dtype=float) for n in names)
    values = np.full(tuple(len(g) for g in grids) + (len(value_names),), np.nan)
    for index in itertools.product(*(range(len(g)) for g in grids)):
        point = {n: float(g[i]) for n, g, i in zip(names, grids, index)}
        try:
            values[index] = func(**point)
        except (EnergyBudgetExceeded, InvalidPurity):
            pass  # inadmissible corner of the grid stays NaN
    return names, grids, tuple(value_names), values


def _metadata(figure: str, settings: ScanSettings, tracker: _Tracker, **extra) -> dict:
    meta = {
        "tool": f"squeezepsk {__version__}",
        "figure": figure,
        "tolerances": {
            "quadrature_abs": quadrature.DEFAULT_TOL,
            "root_xtol": ROOT_XTOL,
            "cutoff_target_tail": settings.cutoff.target_tail,
            "cutoff_hard_max": settings.cutoff.hard_max,
        },
        "cutoff_used": tracker.cutoff_used,
    }
    meta.update(extra)
    return meta


def _homodyne(energy, beta, purity=1.0, sigma=0.0):
    budget = ChannelBudget(energy, beta)
    if sigma == 0 and purity == 1.0:
        return error_probability_pure(budget)
    return error_probability(budget, purity, PhaseNoise(sigma))


def scan_figure(figure: str, settings: ScanSettings = ScanSettings()) -> ScanTable:
    """Dataset behind one figure panel."""
    s = settings
    tracker = _Tracker()
    params = {}
    if figure == "fig1-left":
        axes = {"beta": s.betas, "energy": s.energies}
        cols = ("p_helstrom",)
        func = lambda beta, energy: (helstrom_pure(ChannelBudget(energy, beta)),)
    elif figure == "fig1-right":
        axes = {"beta": s.betas, "energy": s.energies}
        cols = ("p_homodyne",)
        func = lambda beta, energy: (error_probability_pure(ChannelBudget(energy, beta)),)
    elif figure == "fig2-left":
        axes = {"sigma": s.noise_family, "beta": s.betas, "energy": s.energies}
        cols = ("p_homodyne",)
        func = lambda sigma, beta, energy: (_homodyne(energy, beta, sigma=sigma),)
    elif figure == "fig2-right":
        axes = {"energy": s.threshold_energies, "sigma": s.threshold_sigmas}
        cols = ("beta_th",)
        func = lambda energy, sigma: (beta_threshold_numeric(energy, PhaseNoise(sigma)).value,)
    elif figure == "fig3":
        return _fig3(s, tracker)
    elif figure == "fig4-left":
        axes = {"sigma": s.noise_family, "beta": s.betas, "purity": s.purities}
        cols = ("p_homodyne",)
        energy = s.fig4_energy
        params = {"energy": energy}
        func = lambda sigma, beta, purity: (_homodyne(energy, beta, purity, sigma),)
    elif figure == "fig4-right":
        axes = {"sigma": s.noise_family, "purity": s.purities}
        cols = ("beta_th",)
        energy = s.fig4_energy
        params = {"energy": energy}

        def func(sigma, purity):
            return (beta_threshold_numeric(energy, PhaseNoise(sigma), purity).value,)
    elif figure == "fig5-left":
        axes = {"energy": s.fig5_energies, "purity": s.purities}
        cols = ("sigma_th", "purity_min")

        def func(energy, purity):
            return (sigma_threshold(energy, purity).value, min_purity(energy))
    elif figure == "fig5-right":
        axes = {"energy": s.fig5_energies, "sigma": s.g_sigmas}
        cols = ("g",)
        func = lambda energy, sigma: (g_function(energy, sigma),)
    else:
        raise UnknownKind(f"unknown figure {figure!r}; expected one of {FIGURES}")
    names, grids, cols, values = _fill(axes, cols, func)
    return ScanTable(names, grids, cols, values, _metadata(figure, s, tracker, parameters=params))


def _fig3(s: ScanSettings, tracker: _Tracker) -> ScanTable:
    """Homodyne vs Helstrom against phase noise, for beta_opt and coherent states."""
    sigmas = np.asarray(s.fig3_sigmas, dtype=float)
    cols = ("p_homodyne_dss", "p_helstrom_dss", "p_homodyne_cs", "p_helstrom_cs")
    values = np.empty((len(s.fig3_energies), len(sigmas), len(cols)))
    for i, energy in enumerate(s.fig3_energies):
        budgets = (ChannelBudget(energy, beta_closed_forms(energy)[1]), ChannelBudget(energy, 0.0))
        for j, budget in enumerate(budgets):
            plus, minus = helstrom_states(budget, cutoff=s.cutoff)
            tracker.note(plus)
            for k, sigma in enumerate(sigmas):
                noise = PhaseNoise(float(sigma))
                values[i, k, 2 * j] = _homodyne(energy, budget.squeezing_fraction, sigma=noise.sigma)
                values[i, k, 2 * j + 1] = fock.helstrom_mixed(
                    fock.dephase(plus, noise.sigma), fock.dephase(minus, noise.sigma)
                )
    params = {"beta_dss": "beta_opt(N) = N/(2N+1)", "beta_cs": 0.0}
    return ScanTable(
        ("energy", "sigma"),
        (s.fig3_energies, sigmas),
        cols,
        values,
        _metadata("fig3", s, tracker, parameters=params),
    )


# -- explicit axes -------------------------------------------------------------

QUANTITIES = ("helstrom", "homodyne", "g", "beta-threshold", "sigma-threshold")
AXIS_NAMES = ("energy", "beta", "sigma", "purity")


def scan_axes(
    quantity: str,
    axes: dict[str, list[float]],
    fixed: dict[str, float] | None = None,
    cutoff: CutoffPolicy = CutoffPolicy(),
    metric: str = "homodyne",
) -> ScanTable:
    """Map one quantity over an explicit product grid.

    `axes` and `fixed` together must supply the parameters the quantity needs
    among energy, beta, sigma and purity (sigma and purity default to 0 and 1).
    """
    fixed = dict(fixed or {})
    for name in list(axes) + list(fixed):
        if name not in AXIS_NAMES:
            raise ValidationError(f"unknown axis {name!r}; expected one of {AXIS_NAMES}")
    tracker = _Tracker()

    def func(**point):
        p = {"sigma": 0.0, "purity": 1.0, **fixed, **point}
        if quantity == "helstrom":
            budget = ChannelBudget(p["energy"], p["beta"])
            if p["sigma"] == 0 and p["purity"] == 1.0:
                return (helstrom_pure(budget),)
            plus, minus = helstrom_states(budget, p["purity"], PhaseNoise(p["sigma"]), cutoff)
            tracker.note(plus)
            return (fock.helstrom_mixed(plus, minus),)
        if quantity == "homodyne":
            return (_homodyne(p["energy"], p["beta"], p["purity"], p["sigma"]),)
        if quantity == "g":
            return (g_function(p["energy"], p["sigma"]),)
        if quantity == "beta-threshold":
            return (
                beta_threshold_numeric(
                    p["energy"], PhaseNoise(p["sigma"]), p["purity"], metric, cutoff
                ).value,
            )
        if quantity == "sigma-threshold":
            return (sigma_threshold(p["energy"], p["purity"]).value,)
        raise UnknownKind(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")

    if quantity not in QUANTITIES:
        raise UnknownKind(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    names, grids, cols, values = _fill(axes, (quantity.replace("-", "_"),), func)
    meta = _metadata(
        f"explicit:{quantity}", ScanSettings(cutoff=cutoff), tracker, parameters=fixed
    )
    return ScanTable(names, grids, cols, values, meta)
