"""Functionals evaluated on Navier-Stokes trajectories against an Euler reference."""

from .functionals import (
    CRITERIA,
    LayerRegion,
    convergence_metric,
    criterion,
    criterion_density,
    layer_region,
    luca_check,
    luca_exponents,
    metric_series,
    relative_energy,
    strip_constant,
    thm2_exponent,
    time_integral,
)
from .gronwall import GronwallFit, gronwall_fit
from .remainders import TERMS, RemainderSeries, remainder_terms
from .report import DiagnosticsReport, diagnose, parse_report
from .smu import frob2, s_mu, s_mu_both, sueur_stress

__all__ = [
    "CRITERIA",
    "DiagnosticsReport",
    "GronwallFit",
    "LayerRegion",
    "RemainderSeries",
    "TERMS",
    "convergence_metric",
    "criterion",
    "criterion_density",
    "diagnose",
    "frob2",
    "gronwall_fit",
    "layer_region",
    "luca_check",
    "luca_exponents",
    "metric_series",
    "parse_report",
    "relative_energy",
    "remainder_terms",
    "s_mu",
    "s_mu_both",
    "strip_constant",
    "sueur_stress",
    "thm2_exponent",
    "time_integral",
]
