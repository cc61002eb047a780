"""Finite-volume Navier-Stokes and Euler solvers on slabs and channels."""

from .fluxes import Dissipation, euler_rhs, face_gradients, ns_rhs, rhs
from .grid import Grid, restrict
from .integrate import euler_solve, ns_solve, output_times, stable_dt
from .io import read_snapshot, write_snapshot
from .state import FluidState, SolverConfig, Trajectory
from .weak import (
    EnergyResidual,
    bump_test_function,
    continuity_residual,
    energy_residual,
    spatial_gradient,
    total_energy,
    weak_form_residual,
)

__all__ = [
    "Dissipation",
    "EnergyResidual",
    "FluidState",
    "Grid",
    "SolverConfig",
    "Trajectory",
    "bump_test_function",
    "continuity_residual",
    "energy_residual",
    "euler_rhs",
    "euler_solve",
    "face_gradients",
    "ns_rhs",
    "ns_solve",
    "output_times",
    "read_snapshot",
    "restrict",
    "rhs",
    "spatial_gradient",
    "stable_dt",
    "total_energy",
    "weak_form_residual",
    "write_snapshot",
]
