"""Least-squares fits shared by the layer checks, sweeps and reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SlopeFit", "loglog_slope", "convergence_order"]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float        # root-mean-square residual in log space
    n: int

    def __str__(self):
        return f"slope={self.slope:.4f} (rms residual {self.residual:.2e}, n={self.n})"


def loglog_slope(x, y):
    """OLS fit log y = slope log x + intercept over the finite positive pairs.

    Returns a fit with NaN slope when fewer than two usable points remain.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    n = int(np.count_nonzero(ok))
    if n < 2:
        return SlopeFit(float("nan"), float("nan"), float("nan"), n)
    lx, ly = np.log(x[ok]), np.log(y[ok])
    slope, intercept = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + intercept)
    return SlopeFit(float(slope), float(intercept), float(np.sqrt(np.mean(res ** 2))), n)


def convergence_order(h, err):
    """Observed order of ``err`` against mesh size ``h`` (log-log OLS slope)."""
    return loglog_slope(h, err).slope
