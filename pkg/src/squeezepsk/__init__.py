"""Binary phase-shift keying with displaced squeezed states: error
probabilities, Helstrom bounds and squeezing thresholds under phase diffusion
and lossy preparation."""

__version__ = "0.1.0"

from .analysis import (
    ThresholdResult,
    beta_closed_forms,
    beta_threshold_numeric,
    g_function,
    helstrom_noisy,
    helstrom_pure,
    sigma_threshold,
)
from .fock import CutoffPolicy, FockDensityMatrix, build_state, dephase, helstrom_mixed, trace_distance
from .gaussian_core import (
    ChannelBudget,
    LossyPreparation,
    SeedState,
    budget_to_seed,
    energy_of,
    loss_map,
    rotated_quadrature_stats,
)
from .receiver import PhaseNoise, asymptotic_error, error_probability, error_probability_pure
from .scans import ScanTable, scan_axes, scan_figure
