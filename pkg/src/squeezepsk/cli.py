"""Command-line front end.

Every subcommand takes the same parameter flags; values from ``--config``
(YAML or JSON) fill in whatever the flags leave unset.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from . import __version__, fock, quadrature
from .analysis import (
    METRICS,
    ROOT_XTOL,
    beta_threshold_numeric,
    g_function,
    helstrom_pure,
    helstrom_states,
    sigma_threshold,
)
from .errors import (
    EnergyBudgetExceeded,
    InvalidPurity,
    InvalidTransmissivity,
    NumericalError,
    ValidationError,
)
from .fock import CutoffPolicy
from .gaussian_core import ChannelBudget, LossyPreparation, loss_map
from .receiver import PhaseNoise, error_probability, error_probability_pure
from .scans import FIGURES, ScanSettings, ScanTable, scan_figure, to_csv, to_json

CONFIG_KEYS = (
    "energy",
    "beta",
    "sigma",
    "purity",
    "eta",
    "r_tilde",
    "metric",
    "figure",
    "cutoff_tail",
    "quad_nodes",
    "format",
    "output",
)

FLAG_NAMES = {key: "--" + key.replace("_", "-") for key in CONFIG_KEYS}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text()
    data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise click.BadParameter("config file must hold a mapping", param_hint="--config")
    unknown = sorted(set(data) - set(CONFIG_KEYS) - {"command"})
    if unknown:
        raise click.BadParameter(f"unknown config keys: {', '.join(unknown)}", param_hint="--config")
    return data


class RunConfig(dict):
    """Merged parameters: explicit flags win over the config file."""

    def flag(self, key):
        return FLAG_NAMES[key]

    def require(self, key):
        if self.get(key) is None:
            raise click.UsageError(f"missing required option {self.flag(key)}")
        return self[key]


def _resolve(config_path, flags: dict) -> RunConfig:
    merged = RunConfig(_load_config(config_path))
    merged.pop("command", None)
    for key, value in flags.items():
        if value is not None:
            merged[key] = value
    return merged


def _validate(cfg: RunConfig, point: bool = True) -> dict:
    """Turn a RunConfig into typed library arguments; exit code 2 on failure."""
    out = {}
    has_loss = cfg.get("eta") is not None or cfg.get("r_tilde") is not None
    if has_loss:
        if cfg.get("purity") is not None:
            raise click.BadParameter(
                "give either --purity or --eta/--r-tilde, not both", param_hint="--purity"
            )
        for key in ("eta", "r_tilde"):
            if cfg.get(key) is None:
                raise click.BadParameter(
                    "--eta and --r-tilde must be given together", param_hint=FLAG_NAMES[key]
                )
        if cfg.get("beta") is not None:
            raise click.BadParameter(
                "--beta is fixed by --eta/--r-tilde and cannot be set as well", param_hint="--beta"
            )
    for key in ("energy", "beta", "sigma", "purity", "eta", "r_tilde", "cutoff_tail"):
        if cfg.get(key) is not None:
            try:
                cfg[key] = float(cfg[key])
            except (TypeError, ValueError):
                raise click.BadParameter(f"not a number: {cfg[key]!r}", param_hint=FLAG_NAMES[key])
    if cfg.get("beta") is not None and not 0.0 <= cfg["beta"] <= 1.0:
        raise click.BadParameter("must lie in [0, 1]", param_hint="--beta")
    if cfg.get("purity") is not None and not 0.0 < cfg["purity"] <= 1.0:
        raise click.BadParameter("must lie in (0, 1]", param_hint="--purity")
    if cfg.get("sigma") is not None and not cfg["sigma"] >= 0:
        raise click.BadParameter("must be >= 0", param_hint="--sigma")
    if cfg.get("energy") is not None and not cfg["energy"] >= 0:
        raise click.BadParameter("must be >= 0", param_hint="--energy")
    if cfg.get("quad_nodes") is not None:
        nodes = int(cfg["quad_nodes"])
        if nodes not in quadrature.NODE_COUNTS:
            raise click.BadParameter(
                f"must be one of {quadrature.NODE_COUNTS}", param_hint="--quad-nodes"
            )
        cfg["quad_nodes"] = nodes
    try:
        out["cutoff"] = CutoffPolicy(target_tail=cfg.get("cutoff_tail") or 1e-12)
    except ValidationError as exc:
        raise click.BadParameter(str(exc), param_hint="--cutoff-tail")
    out["purity"] = 1.0 if cfg.get("purity") is None else cfg["purity"]
    out["sigma"] = cfg.get("sigma") or 0.0
    if has_loss:
        try:
            purity, squeezing = loss_map(LossyPreparation(cfg["r_tilde"], cfg["eta"]))
        except ValidationError as exc:
            raise click.BadParameter(str(exc), param_hint="--eta")
        out["purity"] = purity
        out["derived"] = {"purity": purity, "squeezing": squeezing}
        if point:
            energy = cfg.require("energy")
            cfg["beta"] = 0.0 if energy == 0 else math.sinh(squeezing) ** 2 / energy
            out["derived"]["beta"] = cfg["beta"]
    return out


def _metadata(command: str, cfg: RunConfig, **extra) -> dict:
    params = {k: cfg.get(k) for k in CONFIG_KEYS if k not in ("format", "output") and cfg.get(k) is not None}
    meta = {
        "tool": f"squeezepsk {__version__}",
        "command": command,
        "parameters": params,
        "tolerances": {
            "quadrature_abs": quadrature.DEFAULT_TOL,
            "root_xtol": ROOT_XTOL,
            "cutoff_target_tail": cfg.get("cutoff_tail") or 1e-12,
        },
        "cutoff_used": None,
    }
    meta.update((k, v) for k, v in extra.items() if v is not None)
    return meta


def _emit(table: ScanTable, cfg: RunConfig, default_format: str) -> None:
    fmt = cfg.get("format") or (default_format if cfg.get("output") is None else "csv")
    if fmt not in ("text", "csv", "json"):
        raise click.BadParameter("must be text, csv or json", param_hint="--format")
    if fmt == "text":
        if cfg.get("output") is not None:
            raise click.BadParameter(
                "text output goes to stdout only; use csv or json with --output", param_hint="--format"
            )
        click.echo(" ".join(format(float(v), ".12g") for v in table.values.ravel()))
        return
    text = to_csv(table) if fmt == "csv" else to_json(table)
    if cfg.get("output") is None:
        click.echo(text, nl=False)
    else:
        Path(cfg["output"]).write_text(text)


def _point_table(name: str, values: dict, meta: dict) -> ScanTable:
    return ScanTable((), (), tuple(values), np.array(list(values.values()), dtype=float), meta)


def common_options(func):
    opts = [
        click.option("--energy", "-N", type=float, help="Mean photon number per symbol."),
        click.option("--beta", type=float, help="Squeezing fraction in [0, 1]."),
        click.option("--sigma", type=float, help="Phase-diffusion strength (radians)."),
        click.option("--purity", type=float, help="Seed purity Tr[rho^2]."),
        click.option("--eta", type=float, help="Loss-channel transmissivity (with --r-tilde)."),
        click.option("--r-tilde", "r_tilde", type=float, help="Squeezing before the lossy channel."),
        click.option("--metric", type=click.Choice(METRICS), help="Threshold metric."),
        click.option("--figure", type=click.Choice(FIGURES), help="Figure dataset for `scan`."),
        click.option("--cutoff-tail", type=float, help="Fock truncation tail target (default 1e-12)."),
        click.option("--quad-nodes", type=int, help="Fixed phase-quadrature node count."),
        click.option("--format", "format", type=click.Choice(["text", "csv", "json"])),
        click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write to file."),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False)),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


_ERROR_FLAGS = {
    InvalidPurity: "--purity",
    EnergyBudgetExceeded: "--beta",
    InvalidTransmissivity: "--eta",
}


def _numerics(func):
    """Map library failures onto exit codes 2 (bad input) and 3 (numerical)."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as exc:
            hint = _ERROR_FLAGS.get(type(exc))
            if hint is None:
                raise click.UsageError(str(exc))
            raise click.BadParameter(str(exc), param_hint=hint)
        except NumericalError as exc:
            click.echo(f"Error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
@click.version_option(__version__)
def main():
    """Error probabilities and squeezing thresholds for squeezed-state PSK."""


@main.command()
@common_options
@_numerics
def helstrom(config_path, **flags):
    """Helstrom bound (closed form when pure and noiseless, Fock oracle otherwise)."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg)
    budget = ChannelBudget(cfg.require("energy"), cfg.get("beta") or 0.0)
    meta = _metadata("helstrom", cfg, derived=args.get("derived"))
    if args["sigma"] == 0 and args["purity"] == 1.0:
        value = helstrom_pure(budget)
        meta["method"] = "closed-form"
    else:
        plus, minus = helstrom_states(budget, args["purity"], PhaseNoise(args["sigma"]), args["cutoff"])
        value = fock.helstrom_mixed(plus, minus)
        meta.update(method="fock-trace-distance", cutoff_used=plus.cutoff, truncation_tail=plus.tail)
    _emit(_point_table("helstrom", {"p_helstrom": value}, meta), cfg, "text")


@main.command()
@common_options
@_numerics
def homodyne(config_path, **flags):
    """Homodyne-receiver error probability."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg)
    budget = ChannelBudget(cfg.require("energy"), cfg.get("beta") or 0.0)
    meta = _metadata("homodyne", cfg, derived=args.get("derived"))
    noise = PhaseNoise(args["sigma"])
    if noise.sigma == 0 and args["purity"] == 1.0:
        value = error_probability_pure(budget)
    else:
        rule = None
        if cfg.get("quad_nodes") and noise.sigma > 0:
            rule = quadrature.phase_rule(cfg["quad_nodes"], noise.sigma)
            meta["quad_nodes_used"] = rule.size
        value = error_probability(budget, args["purity"], noise, rule)
    _emit(_point_table("homodyne", {"p_homodyne": value}, meta), cfg, "text")


def _threshold_table(name, result, meta):
    values = {
        name: result.value,
        "bracket_low": result.bracket[0],
        "bracket_high": result.bracket[1],
        "iterations": result.iterations,
        "residual": result.residual,
        "advantage": float(result.advantage),
    }
    return _point_table(name, values, meta)


@main.command("threshold-beta")
@common_options
@_numerics
def threshold_beta(config_path, **flags):
    """Largest squeezing fraction that still beats coherent states."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg, point=False)
    metric = cfg.get("metric") or "homodyne"
    cfg["metric"] = metric
    result = beta_threshold_numeric(
        cfg.require("energy"), PhaseNoise(args["sigma"]), args["purity"], metric, args["cutoff"]
    )
    table = _threshold_table("beta_th", result, _metadata("threshold-beta", cfg))
    if cfg.get("format") in (None, "text") and cfg.get("output") is None:
        click.echo(format(result.value, ".12g"))
    else:
        _emit(table, cfg, "csv")


@main.command("threshold-sigma")
@common_options
@_numerics
def threshold_sigma(config_path, **flags):
    """Largest phase noise at which a little squeezing still helps."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg, point=False)
    result = sigma_threshold(cfg.require("energy"), args["purity"])
    table = _threshold_table("sigma_th", result, _metadata("threshold-sigma", cfg))
    if cfg.get("format") in (None, "text") and cfg.get("output") is None:
        click.echo(format(result.value, ".12g"))
    else:
        _emit(table, cfg, "csv")


@main.command("g")
@common_options
@_numerics
def g_command(config_path, **flags):
    """Small-squeezing coefficient g(N; sigma)."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg, point=False)
    energy, sigma = cfg.require("energy"), args["sigma"]
    meta = _metadata("g", cfg)
    rule = None
    if cfg.get("quad_nodes") and sigma > 0:
        rule = quadrature.phase_rule(cfg["quad_nodes"], sigma)
        meta["quad_nodes_used"] = rule.size
    value = g_function(energy, sigma, rule)
    _emit(_point_table("g", {"g": value}, meta), cfg, "text")


@main.command()
@common_options
@_numerics
def scan(config_path, **flags):
    """Regenerate the dataset behind one figure panel."""
    cfg = _resolve(config_path, flags)
    args = _validate(cfg, point=False)
    figure = cfg.require("figure")
    if figure not in FIGURES:
        raise click.BadParameter(f"must be one of {FIGURES}", param_hint="--figure")
    if cfg.get("format") == "text":
        raise click.BadParameter("scan output must be csv or json", param_hint="--format")
    table = scan_figure(figure, ScanSettings(cutoff=args["cutoff"]))
    table.metadata["command"] = "scan"
    _emit(table, cfg, "csv")


if __name__ == "__main__":
    main()
