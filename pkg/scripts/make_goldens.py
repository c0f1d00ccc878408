"""Regenerate the regression goldens under tests/goldens/.

Run from the repository root: python3 scripts/make_goldens.py
"""

import json
from pathlib import Path

from squeezepsk.analysis import beta_threshold_numeric, helstrom_noisy, sigma_threshold
from squeezepsk.gaussian_core import ChannelBudget
from squeezepsk.receiver import PhaseNoise
from squeezepsk.scans import scan_figure, to_csv

OUT = Path(__file__).resolve().parents[1] / "tests" / "goldens"


def points():
    return {
        "helstrom_mixed N=1 beta=1/3 sigma=0.2": helstrom_noisy(ChannelBudget(1.0, 1 / 3), noise=PhaseNoise(0.2)),
        "helstrom_mixed N=2 beta=0.4 sigma=0.5 purity=0.9": helstrom_noisy(
            ChannelBudget(2.0, 0.4), 0.9, PhaseNoise(0.5)
        ),
        "beta_th homodyne N=2 sigma=0.3": beta_threshold_numeric(2.0, PhaseNoise(0.3)).value,
        "beta_th homodyne N=2 sigma=0.3 purity=0.8": beta_threshold_numeric(2.0, PhaseNoise(0.3), 0.8).value,
        "beta_th helstrom N=1 sigma=0.1": beta_threshold_numeric(1.0, PhaseNoise(0.1), metric="helstrom").value,
        "sigma_th N=2": sigma_threshold(2.0).value,
        "sigma_th N=3": sigma_threshold(3.0).value,
        "sigma_th N=10": sigma_threshold(10.0).value,
        "sigma_th N=2 purity=0.9": sigma_threshold(2.0, 0.9).value,
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "points.json").write_text(json.dumps(points(), indent=2, sort_keys=True) + "\n")
    for figure in ("fig3", "fig5-left"):
        (OUT / f"{figure}.csv").write_text(to_csv(scan_figure(figure)))


if __name__ == "__main__":
    main()
