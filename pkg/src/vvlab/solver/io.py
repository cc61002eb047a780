"""Plain-text snapshot tables.

Layout: a block of ``# key = value`` header lines (t, gamma, eps, r1, dim,
n, lengths, columns) followed by one whitespace-separated row per cell.
Column order is ``x rho m`` in 1D and ``x y rho m_x m_y`` in the channel,
with the x index varying slowest.  Values are written with 17 significant
digits so a round trip is exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .grid import Grid
from .state import FluidState

__all__ = ["write_snapshot", "read_snapshot", "COLUMNS"]

COLUMNS = {1: ("x", "rho", "m"), 2: ("x", "y", "rho", "m_x", "m_y")}


def write_snapshot(path, state, gamma, eps=0.0, r1=0.0):
    grid = state.grid
    cols = COLUMNS[grid.dim]
    header = [
        f"t = {state.t!r}",
        f"gamma = {gamma!r}",
        f"eps = {eps!r}",
        f"r1 = {r1!r}",
        f"dim = {grid.dim}",
        "n = " + " ".join(str(k) for k in grid.n),
        "lengths = " + " ".join(repr(L) for L in grid.lengths),
        "columns = " + " ".join(cols),
    ]
    data = [c.ravel() for c in grid.centers] + [state.rho.ravel()] + [state.m[k].ravel() for k in range(grid.dim)]
    path = Path(path)
    try:
        np.savetxt(path, np.column_stack(data), fmt="%.17g", header="\n".join(header), comments="# ")
    except OSError as exc:
        raise OSError(f"cannot write snapshot to {path}: {exc}") from exc
    return path


def read_snapshot(path):
    """Parse a snapshot table; returns ``(FluidState, meta)``."""
    path = Path(path)
    meta = {}
    with path.open() as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
    try:
        dim = int(meta["dim"])
        n = tuple(int(v) for v in meta["n"].split())
        lengths = tuple(float(v) for v in meta["lengths"].split())
    except KeyError as exc:
        raise ConfigurationError(f"{path}: missing header field {exc}") from None
    if tuple(meta.get("columns", "").split()) != COLUMNS[dim]:
        raise ConfigurationError(f"{path}: unexpected column layout {meta.get('columns')!r}")
    grid = Grid(n, lengths)
    table = np.loadtxt(path, ndmin=2)
    rho = table[:, dim].reshape(grid.shape)
    m = np.stack([table[:, dim + 1 + k].reshape(grid.shape) for k in range(dim)])
    parsed = {k: float(meta[k]) for k in ("t", "gamma", "eps", "r1")}
    return FluidState(grid, rho, m, parsed["t"]), parsed
