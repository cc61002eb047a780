"""Relative energy, strip integrals, the vanishing-viscosity criteria and
the comparison metric against the Euler reference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError, ParameterError
from ..thermo import relative_entropy
from ..solver.weak import spatial_gradient
from .smu import frob2, s_mu, sueur_stress

__all__ = [
    "relative_energy",
    "LayerRegion",
    "layer_region",
    "CRITERIA",
    "criterion",
    "criterion_density",
    "thm2_exponent",
    "convergence_metric",
    "metric_series",
    "luca_check",
    "luca_exponents",
    "time_integral",
]


def time_integral(values, times):
    """Trapezoid rule over stored snapshots."""
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        return 0.0
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(times)))


def relative_energy(state, r, U, g, rho_floor=1e-10):
    """int 1/2 |sqrt(rho) u - sqrt(rho) U|^2 + int H(rho | r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("relative energy needs a positive reference density")
    rho = state.rho
    U = np.asarray(U, dtype=float)
    if U.ndim == rho.ndim:
        U = U[None]
    dm = state.m - rho * U
    kin = 0.5 * np.sum(dm * dm, axis=0) / np.maximum(rho, rho_floor)
    return state.grid.integrate(kin + relative_entropy(g, rho, r))


@dataclass(frozen=True)
class LayerRegion:
    """Cells of the wall strip {d < c eps}."""

    c: float
    eps: float
    mask: np.ndarray
    measure: float
    bound: float           # C_geom eps with C_geom = 2c (times Lx in the channel)


def layer_region(grid, c, eps):
    mask = grid.d_wall < c * eps
    if not np.any(mask):
        raise ConfigurationError(f"strip d < {c * eps:g} contains no cell centre (spacing {grid.spacing})")
    mask.setflags(write=False)
    measure = float(np.count_nonzero(mask)) * grid.cell_volume
    return LayerRegion(float(c), float(eps), mask, measure, strip_constant(grid, c) * eps)


def strip_constant(grid, c):
    """C with |strip| <= C eps: 2c in 1D and 2c Lx in the channel."""
    return 2.0 * c * grid.wall_length


CRITERIA = ("thm1", "thm2", "sueur", "bardos_nguyen", "bica", "cor", "byebye")


def thm2_exponent(gamma, nu):
    return 1.0 - (2.0 / 3.0 + 1.0 / (3.0 * nu)) / gamma


def criterion_density(name, state, law, g, eps, rho_floor=1e-10):
    """Pointwise integrand of criterion ``name`` on the whole grid."""
    grid = state.grid
    rho = state.rho
    u = state.m / np.maximum(rho, rho_floor)
    d2 = grid.d_wall ** 2
    gam = g.gamma
    speed2 = np.sum(u * u, axis=0)
    un = np.sum(u * grid.normal, axis=0)
    kin = rho * speed2 / d2
    a = (gam - 1.0) / gam
    if name == "thm1":
        return rho ** gam / eps + eps * kin
    if name == "thm2":
        S = s_mu(state, law, grid, "defT")
        normal = rho * (np.sqrt(rho) * un) ** 2 / d2
        return eps * kin + eps * normal + eps ** thm2_exponent(gam, law.nu) * frob2(S)
    if name == "sueur":
        return eps * kin + eps * rho ** 2 * un ** 2 / d2 + eps * frob2(sueur_stress(grid, u))
    if name == "bardos_nguyen":
        return rho ** gam + eps * kin + eps * frob2(spatial_gradient(grid, u))
    if name == "bica":
        return rho ** gam / eps + eps ** a * kin
    if name == "cor":
        return eps ** a * frob2(s_mu(state, law, grid, "defT"))
    if name == "byebye":
        return eps ** a * kin
    raise ParameterError(f"unknown criterion {name!r}; choose from {CRITERIA}")


def criterion(name, traj, region, law, g):
    """Space-time integral of the named criterion over [0, T] x strip."""
    if name not in CRITERIA:
        raise ParameterError(f"unknown criterion {name!r}; choose from {CRITERIA}")
    grid = traj.grid
    vals = np.empty(traj.times.size)
    for k in range(traj.times.size):
        f = criterion_density(name, traj.state(k), law, g, region.eps, traj.cfg.rho_floor)
        vals[k] = grid.integrate(np.where(region.mask, f, 0.0))
    return time_integral(vals, traj.times)


def metric_series(traj, euler_ref, g):
    """||rho - rho_E||_{L^gamma} + ||rho u - rho_E u_E||_{L^1} at every snapshot."""
    ref = euler_ref.restrict(traj.grid) if euler_ref.grid != traj.grid else euler_ref
    traj.check_compatible(ref)
    grid = traj.grid
    out = np.empty(traj.times.size)
    for k in range(traj.times.size):
        drho = np.abs(traj.rho[k] - ref.rho[k])
        dm = np.sqrt(np.sum((traj.m[k] - ref.m[k]) ** 2, axis=0))
        out[k] = grid.integrate(drho ** g.gamma) ** (1.0 / g.gamma) + grid.integrate(dm)
    return out


def convergence_metric(traj, euler_ref, g):
    """sup over stored times of the density/momentum distance to Euler."""
    return float(np.max(metric_series(traj, euler_ref, g)))


def luca_exponents(gamma, nu):
    return (gamma / 2.0, 2.0 / 3.0 + nu / 3.0, 2.0 / 3.0 + 1.0 / (3.0 * nu))


def luca_check(traj, region, g, ell):
    """Holder bound int int_strip rho^ell / eps <= C (int int_strip rho^gamma / eps)^(ell/gamma).

    C = (T C_geom)^(1 - ell/gamma), from |strip| <= C_geom eps with
    C_geom = 2c (times Lx in the channel).  Returns ``(lhs, rhs)``.
    """
    gam = g.gamma
    if not (0.0 < ell <= gam):
        raise ParameterError(f"exponent ell must lie in (0, gamma]; got {ell}")
    grid = traj.grid
    eps = region.eps
    mask = region.mask
    lo = np.empty(traj.times.size)
    hi = np.empty(traj.times.size)
    for k in range(traj.times.size):
        rho = traj.rho[k]
        lo[k] = grid.integrate(np.where(mask, rho ** ell, 0.0))
        hi[k] = grid.integrate(np.where(mask, rho ** gam, 0.0))
    T = float(traj.times[-1] - traj.times[0])
    lhs = time_integral(lo, traj.times) / eps
    base = time_integral(hi, traj.times) / eps
    C = (T * strip_constant(grid, region.c)) ** (1.0 - ell / gam)
    return lhs, C * base ** (ell / gam)
