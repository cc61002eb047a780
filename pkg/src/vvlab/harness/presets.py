"""Smooth, vacuum-free initial data compatible with slip walls."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..solver.grid import Grid
from ..solver.state import FluidState, Trajectory

__all__ = ["Preset", "PRESETS", "get_preset", "bump1d", "channel2d", "steady_shear_trajectory"]


def _flat_bump(s):
    """exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside; all derivatives vanish at |s| = 1."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    w = np.where(inside, 1.0 - s * s, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)


def bump1d(grid, amp_rho=0.2, width=0.15, amp_u=0.2):
    """rho = 1 + amp_rho exp(-((x - L/2)/(width L))^2), u = amp_u * flat bump in s = 2x/L - 1."""
    L = grid.lengths[0]
    x = grid.centers[0]
    rho = 1.0 + amp_rho * np.exp(-(((x - 0.5 * L) / (width * L)) ** 2))
    u = amp_u * _flat_bump(2.0 * x / L - 1.0)
    return FluidState.from_primitive(grid, rho, u)


def shear_profile(grid, U0=0.2, delta=0.1):
    """Exact cell averages of U0 tanh((y - H/2)/delta)."""
    H = grid.lengths[1]
    hy = grid.spacing[1]
    yc = grid.axes_centers[1]
    lo = (yc - 0.5 * hy - 0.5 * H) / delta
    hi = (yc + 0.5 * hy - 0.5 * H) / delta

    def logcosh(a):
        a = np.abs(a)
        return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)

    avg = U0 * delta * (logcosh(hi) - logcosh(lo)) / hy
    return np.broadcast_to(avg, grid.shape).copy()


def channel2d(grid, U0=0.2, delta=0.1):
    """rho = 1, u = (U0 tanh((y - H/2)/delta), 0): a steady Euler shear."""
    rho = np.ones(grid.shape)
    u = np.zeros((2,) + grid.shape)
    u[0] = shear_profile(grid, U0, delta)
    return FluidState.from_primitive(grid, rho, u)


def steady_shear_trajectory(grid, times, cfg, U0=0.2, delta=0.1):
    """Exact Euler trajectory of the channel shear, stored at ``times``."""
    st = channel2d(grid, U0, delta)
    nt = len(times)
    rho = np.broadcast_to(st.rho, (nt,) + grid.shape)
    m = np.broadcast_to(st.m, (nt,) + st.m.shape)
    return Trajectory(grid, times, rho, m, cfg.inviscid(), kind="euler", stats={"exact": True})


@dataclass(frozen=True)
class Preset:
    """Initial data plus the grid family tied to eps through h <= c eps / 8."""

    name: str
    dim: int
    lengths: tuple
    init: object
    nx_channel: int = 8

    def grid(self, n_wall):
        """Grid with ``n_wall`` cells across the walls."""
        if self.dim == 1:
            return Grid.slab(n_wall, self.lengths[0])
        return Grid.channel(self.nx_channel, n_wall, *self.lengths)

    def grid_for(self, eps, c, cells_per_layer=8):
        """Smallest power-of-two wall resolution with spacing <= c eps / cells_per_layer."""
        H = self.lengths[-1]
        need = H * cells_per_layer / (c * eps)
        n = 1 << int(np.ceil(np.log2(need - 1e-9)))
        return self.grid(max(n, 16))


PRESETS = {
    "bump1d": Preset("bump1d", 1, (1.0,), bump1d),
    "channel2d": Preset("channel2d", 2, (1.0, 1.0), channel2d),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
