"""Configuration, eps-sweeps, persistence and the command-line interface."""

from .config import SweepConfig, load_config
from .presets import PRESETS, get_preset, steady_shear_trajectory
from .report import SWEEP_COLUMNS, emit_report, read_sweep_csv
from .sweep import SweepReport, SweepRow, reference_trajectory, run_row, run_sweep, well_prepared_data

__all__ = [
    "PRESETS",
    "SWEEP_COLUMNS",
    "SweepConfig",
    "SweepReport",
    "SweepRow",
    "emit_report",
    "get_preset",
    "load_config",
    "read_sweep_csv",
    "reference_trajectory",
    "run_row",
    "run_sweep",
    "steady_shear_trajectory",
    "well_prepared_data",
]
