"""Barotropic gas law, entropy H and the relative entropy H(rho | r)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "GasLaw",
    "EquivalenceConstants",
    "pressure",
    "pressure_prime",
    "entropy_H",
    "entropy_H_prime",
    "relative_entropy",
    "reference_gauge",
    "fit_equivalence_constants",
    "norm_ratios",
]


@dataclass(frozen=True)
class GasLaw:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ParameterError(f"gamma must exceed 1, got {self.gamma}")


def pressure(g, rho):
    """p(rho) = rho**gamma."""
    return np.asarray(rho, dtype=float) ** g.gamma


def pressure_prime(g, rho):
    return g.gamma * np.asarray(rho, dtype=float) ** (g.gamma - 1.0)


def entropy_H(g, rho):
    """H(rho) = rho**gamma / (gamma - 1)."""
    return np.asarray(rho, dtype=float) ** g.gamma / (g.gamma - 1.0)


def entropy_H_prime(g, rho):
    return g.gamma / (g.gamma - 1.0) * np.asarray(rho, dtype=float) ** (g.gamma - 1.0)


def relative_entropy(g, rho, r):
    """H(rho | r) = H(rho) - H(r) - H'(r) (rho - r), non-negative for r > 0."""
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("relative entropy needs r > 0")
    return entropy_H(g, rho) - entropy_H(g, r) - entropy_H_prime(g, r) * (rho - r)


def reference_gauge(g, rho, r):
    """|rho - r|^2 on {|rho - r| < 1}, |rho - r|^gamma on {|rho - r| >= 1}."""
    d = np.abs(np.asarray(rho, dtype=float) - np.asarray(r, dtype=float))
    return np.where(d < 1.0, d * d, d ** g.gamma)


@dataclass(frozen=True)
class EquivalenceConstants:
    """Constants of the two-sided bound c3 G <= H(rho | r) <= c4 G on r in K.

    ``c5`` is the norm-equivalence constant for a domain of measure
    ``omega_measure``; it is fitted on random piecewise-constant profiles, so
    it is a finite proxy valid for that domain measure only.
    """

    c3: float
    c4: float
    c5: float
    k_lo: float
    k_hi: float
    rho_cap: float
    omega_measure: float
    raw_min: float
    raw_max: float


# below this relative gap H(rho | r) is dominated by cancellation error; the
# ratio there is within O(gap) of its limit gamma r^(gamma-2) / 2, which the
# fit adds separately
_NEAR_DIAGONAL = 1e-4


def _ratio_block(g, rho, r):
    gauge = reference_gauge(g, rho, r)
    h = entropy_H(g, rho) - entropy_H(g, r) - entropy_H_prime(g, r) * (rho - r)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = h / gauge
    return np.where(np.abs(rho - r) > _NEAR_DIAGONAL * r, ratio, np.nan)


def norm_ratios(g, rho, r, cell_measure):
    """Ratios testing the two norm equivalences for one profile pair.

    Returns (a, b) with a = ||rho - r||_gamma^gamma / (I^{gamma/2} + I) and
    b = I / (||rho - r||_gamma^gamma + ||rho - r||_gamma^2), I = int H(rho | r).
    Both are NaN when rho == r identically.
    """
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    I = float(np.sum(relative_entropy(g, rho, r)) * cell_measure)
    A = float(np.sum(np.abs(rho - r) ** g.gamma) * cell_measure)
    if A == 0.0 or I == 0.0:
        return float("nan"), float("nan")
    norm = A ** (1.0 / g.gamma)
    return A / (I ** (g.gamma / 2.0) + I), I / (A + norm * norm)


def fit_equivalence_constants(
    g,
    K,
    rho_cap=None,
    n_rho=10_000,
    n_r=10_000,
    omega_measure=1.0,
    n_profiles=2000,
    pieces=100,
    safety=1e-3,
    seed=0,
    chunk=250,
):
    """Brute-force fit of c3, c4 (pointwise) and c5 (norm) on r in K.

    The pointwise ratio H(rho | r) / gauge is scanned on a dense grid
    rho in [0, rho_cap] x r in K; its limits at rho -> r and rho -> infinity
    are added so extremes outside the grid are not missed, and the final
    constants are widened by the relative ``safety`` factor.
    """
    k_lo, k_hi = (float(v) for v in K)
    if not (0.0 < k_lo <= k_hi and np.isfinite(k_hi)):
        raise ParameterError(f"K must be a compact subset of (0, inf), got {K}")
    gam = g.gamma
    if rho_cap is None:
        rho_cap = max(2.0 * k_hi, 5.0)
    rho_grid = np.linspace(0.0, rho_cap, n_rho)
    r_grid = np.linspace(k_lo, k_hi, n_r) if k_hi > k_lo else np.array([k_lo])

    lo, hi = np.inf, -np.inf
    for start in range(0, r_grid.size, chunk):
        rr = r_grid[start:start + chunk, None]
        ratio = _ratio_block(g, rho_grid[None, :], rr)
        lo = min(lo, float(np.nanmin(ratio)))
        hi = max(hi, float(np.nanmax(ratio)))

    # limits of the ratio at rho -> r and rho -> infinity (the gauge is
    # continuous across |rho - r| = 1, where both branches equal 1)
    edges = [0.5 * gam * r_grid ** (gam - 2.0), [1.0 / (gam - 1.0)]]
    for e in edges:
        e = np.asarray(e)[np.isfinite(e)]
        if e.size:
            lo = min(lo, float(e.min()))
            hi = max(hi, float(e.max()))

    c3 = lo * (1.0 - safety)
    c4 = hi * (1.0 + safety)

    rng = np.random.default_rng(seed)
    cell = omega_measure / pieces
    c5 = 0.0
    for _ in range(n_profiles):
        r_prof = rng.uniform(k_lo, k_hi, pieces)
        scale = 10.0 ** rng.uniform(-4, 1)
        rho_prof = np.maximum(r_prof + scale * rng.standard_normal(pieces), 0.0)
        a, b = norm_ratios(g, rho_prof, r_prof, cell)
        if np.isfinite(a):
            c5 = max(c5, a, b)
    c5 *= 1.0 + safety
    return EquivalenceConstants(c3, c4, c5, k_lo, k_hi, float(rho_cap), float(omega_measure), lo, hi)
