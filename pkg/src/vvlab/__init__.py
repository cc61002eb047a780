"""Vanishing-viscosity laboratory for barotropic Navier-Stokes flows with
density-dependent viscosity, drag and no-slip walls."""

__version__ = "0.1.0"
