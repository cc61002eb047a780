"""Exponential envelope E(tau) <= (E(0) + eta) exp(C tau) fitted to a series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError

__all__ = ["GronwallFit", "gronwall_fit"]


@dataclass(frozen=True)
class GronwallFit:
    C: float
    log_intercept: float
    eta: float            # smallest eta making the envelope hold with slope C
    residual: float       # rms residual of the log-linear fit
    e0: float

    def envelope(self, times):
        return (self.e0 + self.eta) * np.exp(self.C * np.asarray(times, dtype=float))

    def holds(self, times, values, rtol=1e-12):
        v = np.asarray(values, dtype=float)
        env = self.envelope(times)
        return bool(np.all(v <= env * (1.0 + rtol) + rtol * np.finfo(float).tiny))


def gronwall_fit(times, values, e0=None):
    """Least-squares slope of log E on its running-max growth envelope.

    The envelope max_{s <= tau} E(s) is the smallest non-decreasing majorant,
    so the fitted rate C captures growth but ignores transient dips.  The
    returned ``eta`` is the smallest shift with E(tau) <= (E(0)+eta) e^{C tau}
    on every sample (never below the fitted intercept).  An identically zero
    series gives C = 0 and eta = 0.
    """
    t = np.asarray(times, dtype=float)
    E = np.asarray(values, dtype=float)
    if t.shape != E.shape or t.size == 0:
        raise PreconditionError("times and values must be non-empty and of equal length")
    if np.any(~np.isfinite(E)):
        raise PreconditionError("relative-energy series contains non-finite values")
    if np.any(E < 0):
        raise PreconditionError("relative-energy series must be non-negative")
    e0 = float(E[0]) if e0 is None else float(e0)
    env = np.maximum.accumulate(E)
    ok = env > 0
    if np.count_nonzero(ok) < 2:
        return GronwallFit(0.0, float("-inf") if not np.any(ok) else float(np.log(env[ok][0])), max(float(np.max(E)) - e0, 0.0), 0.0, e0)
    lt, le = t[ok], np.log(env[ok])
    if np.ptp(lt) == 0:
        return GronwallFit(0.0, float(le[0]), max(float(np.max(E)) - e0, 0.0), 0.0, e0)
    C, b = np.polyfit(lt, le, 1)
    res = le - (C * lt + b)
    need = float(np.max(E * np.exp(-C * t)))
    eta = max(float(np.exp(b)), need) - e0
    return GronwallFit(float(C), float(b), eta, float(np.sqrt(np.mean(res ** 2))), e0)
