"""Uniform cell-centred grids: a 1D slab [0, L] and a 2D channel.

The channel is periodic in x and bounded by walls at y = 0 and y = H.
Fields are stored with shape ``grid.shape``; vector fields carry a leading
component axis, shape ``(dim, *grid.shape)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import ConfigurationError, ParameterError

__all__ = ["Grid", "restrict"]


@dataclass(frozen=True)
class Grid:
    n: tuple
    lengths: tuple

    def __post_init__(self):
        if len(self.n) != len(self.lengths) or len(self.n) not in (1, 2):
            raise ParameterError("grid must be 1D or 2D with matching n and lengths")
        if any(int(k) < 2 for k in self.n) or any(not (L > 0) for L in self.lengths):
            raise ParameterError(f"invalid grid n={self.n} lengths={self.lengths}")

    @classmethod
    def slab(cls, n, L=1.0):
        return cls((int(n),), (float(L),))

    @classmethod
    def channel(cls, nx, ny, Lx=1.0, H=1.0):
        return cls((int(nx), int(ny)), (float(Lx), float(H)))

    @property
    def dim(self):
        return len(self.n)

    @property
    def shape(self):
        return tuple(int(k) for k in self.n)

    @property
    def wall_axis(self):
        """Axis normal to the walls (x in 1D, y in the channel)."""
        return self.dim - 1

    @property
    def periodic_axes(self):
        return tuple(range(self.dim - 1))

    @cached_property
    def spacing(self):
        return tuple(L / k for L, k in zip(self.lengths, self.n))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    @property
    def wall_length(self):
        """Measure of one wall (1 in 1D, Lx in the channel)."""
        return 1.0 if self.dim == 1 else self.lengths[0]

    @property
    def half_width(self):
        return 0.5 * self.lengths[self.wall_axis]

    @cached_property
    def axes_centers(self):
        return tuple((np.arange(k) + 0.5) * h for k, h in zip(self.n, self.spacing))

    @cached_property
    def centers(self):
        """Cell-centre coordinates, one array of ``shape`` per axis."""
        return tuple(np.meshgrid(*self.axes_centers, indexing="ij"))

    @cached_property
    def d_wall(self):
        """Distance of each cell centre to the nearest wall."""
        s = self.centers[self.wall_axis]
        L = self.lengths[self.wall_axis]
        d = np.minimum(s, L - s)
        d.setflags(write=False)
        return d

    @cached_property
    def normal(self):
        """Outward unit normal of the nearest wall, shape ``(dim, *shape)``."""
        s = self.centers[self.wall_axis]
        L = self.lengths[self.wall_axis]
        nvec = np.zeros((self.dim,) + self.shape)
        nvec[self.wall_axis] = np.where(s < 0.5 * L, -1.0, 1.0)
        nvec.setflags(write=False)
        return nvec

    def refine(self, factor):
        """Same domain, every spacing divided by ``factor``."""
        if isinstance(factor, int):
            factor = (factor,) * self.dim
        return Grid(tuple(k * f for k, f in zip(self.n, factor)), self.lengths)

    def integrate(self, f):
        """Cell-wise quadrature of a field (sums over the trailing grid axes)."""
        f = np.asarray(f, dtype=float)
        axes = tuple(range(f.ndim - self.dim, f.ndim))
        return np.sum(f, axis=axes) * self.cell_volume


def restrict(field, fine, coarse):
    """Conservative block average from ``fine`` to ``coarse`` (same domain).

    Works on arrays whose trailing axes are the fine grid shape.
    """
    if fine.lengths != coarse.lengths:
        raise ConfigurationError("restriction between different domains")
    factors = []
    for kf, kc in zip(fine.n, coarse.n):
        if kf % kc:
            raise ConfigurationError(f"fine grid {fine.n} is not a refinement of {coarse.n}")
        factors.append(kf // kc)
    field = np.asarray(field, dtype=float)
    lead = field.shape[: field.ndim - fine.dim]
    shape = list(lead)
    for kc, f in zip(coarse.n, factors):
        shape += [kc, f]
    blocks = field.reshape(shape)
    axes = tuple(len(lead) + 2 * i + 1 for i in range(fine.dim))
    return blocks.mean(axis=axes)
