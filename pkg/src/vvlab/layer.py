"""Artificial boundary-layer corrector built from a reference Euler flow.

v_bl = xi(d / (c eps)) u^E lives in the strip {d < c eps}; subtracting it
from u^E gives a field U that vanishes on the walls, which makes it an
admissible comparison velocity for the no-slip problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ParameterError
from .fitting import loglog_slope
from .solver.weak import spatial_gradient

__all__ = [
    "Cutoff",
    "make_cutoff",
    "xi",
    "xi_prime",
    "ztilde_bound",
    "LayerProfile",
    "build_layer",
    "null_layer",
    "ScalingRow",
    "LayerScalingTable",
    "verify_layer_scalings",
    "SCALING_TARGETS",
]


def _smoothstep(r):
    r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    return 1.0 - r ** 3 * (10.0 - 15.0 * r + 6.0 * r * r)


def _smoothstep_prime(r):
    r = np.asarray(r, dtype=float)
    inside = (r >= 0.0) & (r < 1.0)
    rc = np.clip(r, 0.0, 1.0)
    return np.where(inside, -30.0 * rc * rc * (1.0 - rc) ** 2, 0.0)


def _bump(r):
    r = np.asarray(r, dtype=float)
    inside = r < 1.0
    w = np.where(inside, 1.0 - r * r, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)


def _bump_prime(r):
    r = np.asarray(r, dtype=float)
    inside = r < 1.0
    w = np.where(inside, 1.0 - r * r, 1.0)
    return np.where(inside, -2.0 * r / (w * w) * np.exp(1.0 - 1.0 / w), 0.0)


@dataclass(frozen=True)
class Cutoff:
    """Profile xi with xi(0) = 1 and xi = 0 on [1, inf)."""

    name: str
    xi: object
    xi_prime: object


CUTOFFS = {
    "smoothstep": Cutoff("smoothstep", _smoothstep, _smoothstep_prime),
    "bump": Cutoff("bump", _bump, _bump_prime),
}


def make_cutoff(name="smoothstep"):
    try:
        return CUTOFFS[name]
    except KeyError:
        raise ParameterError(f"unknown cutoff {name!r}; choose from {sorted(CUTOFFS)}") from None


def xi(cutoff, r):
    return cutoff.xi(r)


def xi_prime(cutoff, r):
    return cutoff.xi_prime(r)


def ztilde_bound(cutoff, n=100_001):
    """max over [0, 1] of r |xi'(r)|, sampled densely."""
    r = np.linspace(0.0, 1.0, n)
    return float(np.max(r * np.abs(cutoff.xi_prime(r))))


@dataclass(frozen=True)
class LayerProfile:
    """Layer fields for every stored Euler snapshot, on the Navier-Stokes grid.

    Time-dependent arrays have shape ``(nt, dim, *grid.shape)`` (vectors) or
    ``(nt, *grid.shape)``.  ``grad_v[k, i, j] = d v_bl_i / d x_j``.
    """

    cutoff: Cutoff
    c: float
    eps: float
    grid: object
    times: np.ndarray
    rho_E: np.ndarray
    u_E: np.ndarray
    grad_uE: np.ndarray
    dt_uE: np.ndarray
    v_bl: np.ndarray
    grad_v: np.ndarray
    dt_v: np.ndarray
    U: np.ndarray
    z: np.ndarray
    z_tilde: np.ndarray
    grad_z: np.ndarray

    @property
    def width(self):
        return self.c * self.eps

    @property
    def div_v(self):
        return np.trace(self.grad_v, axis1=1, axis2=2)

    def wall_trace(self, field):
        """Second-order extrapolation of ``field`` (..., *shape) onto both walls."""
        ax = field.ndim - self.grid.dim + self.grid.wall_axis
        f = np.moveaxis(field, ax, -1)
        lo = (15.0 * f[..., 0] - 10.0 * f[..., 1] + 3.0 * f[..., 2]) / 8.0
        hi = (15.0 * f[..., -1] - 10.0 * f[..., -2] + 3.0 * f[..., -3]) / 8.0
        return lo, hi


def time_derivative(values, times):
    """Second-order differences along the leading (time) axis."""
    if values.shape[0] < 3:
        return np.zeros_like(values)
    return np.gradient(values, times, axis=0, edge_order=2)


def build_layer(grid, euler, c, eps, cutoff=None):
    """Construct the layer profile for ``eps`` from an Euler trajectory.

    ``euler`` is restricted conservatively to ``grid`` when it lives on a
    refinement of it.  Raises :class:`ConfigurationError` when the strips
    of the two walls would overlap (c eps >= half-width).
    """
    if cutoff is None:
        cutoff = make_cutoff()
    elif isinstance(cutoff, str):
        cutoff = make_cutoff(cutoff)
    if not (c > 0 and eps > 0):
        raise ParameterError("layer needs c > 0 and eps > 0")
    width = c * eps
    if width >= grid.half_width:
        raise ConfigurationError(
            f"layer width c*eps = {width:g} reaches the half-width {grid.half_width:g}; strips would merge"
        )
    r = grid.d_wall / width
    zp = cutoff.xi_prime(r)
    return _profile(grid, euler, cutoff, c, eps, cutoff.xi(r), r * zp, -(zp / width) * grid.normal)


def null_layer(grid, euler):
    """Profile with v_bl = 0 (U = u^E), for comparisons without a corrector."""
    zero = np.zeros(grid.shape)
    return _profile(grid, euler, make_cutoff(), 0.0, 0.0, zero, zero, np.zeros((grid.dim,) + grid.shape))


def _profile(grid, euler, cutoff, c, eps, z, z_tilde, grad_z):
    ref = euler.restrict(grid) if euler.grid != grid else euler
    times = np.asarray(ref.times)
    rho_E = np.asarray(ref.rho)
    u_E = ref.velocity()
    nt = times.size
    grad_uE = np.stack([spatial_gradient(grid, u_E[k]) for k in range(nt)])
    dt_uE = time_derivative(u_E, times)
    v_bl = z * u_E
    grad_v = z * grad_uE + np.einsum("ki...,j...->kij...", u_E, grad_z)   # grad d = -n in grad_z
    dt_v = z * dt_uE
    U = u_E - v_bl
    arrays = dict(
        times=times, rho_E=rho_E, u_E=u_E, grad_uE=grad_uE, dt_uE=dt_uE, v_bl=v_bl,
        grad_v=grad_v, dt_v=dt_v, U=U, z=z, z_tilde=z_tilde, grad_z=grad_z,
    )
    for a in arrays.values():
        a.setflags(write=False)
    return LayerProfile(cutoff=cutoff, c=float(c), eps=float(eps), grid=grid, **arrays)


# bound name -> (norm description, target slope as function of p)
SCALING_TARGETS = {
    "prima": ("sup |v_bl|", lambda p: 0.0),
    "gradbl": ("sup |grad v_bl|", lambda p: -1.0),
    "dindon": ("sup |div v_bl|", lambda p: 0.0),
    "gradbl_d": ("||d grad v_bl||_L2", lambda p: 0.5),
    "blLp": ("||v_bl||_Lp", lambda p: 1.0 / p),
    "blLptime": ("||dt v_bl||_Lp", lambda p: 1.0 / p),
    "dindondan": ("||div v_bl||_Lp", lambda p: 1.0 / p),
    "stimabella": ("sup |d^2 grad v_bl|", lambda p: 1.0),
    "boundU": ("sup |U|", lambda p: 0.0),
    "ztilde": ("||z_tilde||_L2(strip)", lambda p: 0.5),
}


def _pointwise_norm(a, ncomp):
    """Euclidean/Frobenius norm over the leading ``ncomp`` component axes."""
    axes = tuple(range(1, 1 + ncomp))
    return np.sqrt(np.sum(a * a, axis=axes)) if ncomp else np.abs(a)


def layer_norms(layer, p=2.0):
    """All layer norms, each taken as a sup over stored times."""
    g = layer.grid
    d = g.d_wall

    def lp(f):
        return (g.integrate(f ** p)) ** (1.0 / p)

    v = _pointwise_norm(layer.v_bl, 1)
    gv = _pointwise_norm(layer.grad_v, 2)
    dv = np.abs(layer.div_v)
    tv = _pointwise_norm(layer.dt_v, 1)
    Un = _pointwise_norm(layer.U, 1)
    strip = d < layer.width
    vals = {
        "prima": np.max(v),
        "gradbl": np.max(gv),
        "dindon": np.max(dv),
        "gradbl_d": np.max(np.sqrt(g.integrate((d * gv) ** 2))),
        "blLp": np.max(lp(v)),
        "blLptime": np.max(lp(tv)),
        "dindondan": np.max(lp(dv)),
        "stimabella": np.max(d * d * gv),
        "boundU": np.max(Un),
        "ztilde": float(np.sqrt(g.integrate(np.where(strip, layer.z_tilde ** 2, 0.0)))),
    }
    return {k: float(v) for k, v in vals.items()}


@dataclass(frozen=True)
class ScalingRow:
    bound: str
    norm: str
    eps: float
    value: float
    slope: float
    target: float
    tol: float
    passed: bool
    note: str = ""

    def csv(self):
        flag = "pass" if self.passed else "FAIL"
        if self.note:
            flag += f" ({self.note})"
        return f"{self.bound},{self.norm},{self.eps:.17g},{self.value:.17g},{self.slope:.6f},{self.target:.6f},{self.tol:g},{flag}"


@dataclass(frozen=True)
class LayerScalingTable:
    rows: tuple
    slopes: dict
    passed: dict

    HEADER = "bound,norm,eps,value,fitted_slope,target_slope,tol,pass"

    def csv(self):
        return "\n".join([self.HEADER] + [r.csv() for r in self.rows]) + "\n"


def verify_layer_scalings(grids, euler, c, eps_list, cutoff=None, p=2.0, tol=0.05, zero_atol=1e-13):
    """Fit log-log slopes of every layer norm across ``eps_list``.

    ``grids[i]`` is the Navier-Stokes grid for ``eps_list[i]``; ``euler`` is
    either a single reference trajectory (restricted onto each grid) or a
    callable ``grid -> trajectory``.  At least four eps values are needed
    for a meaningful slope.  Each grid must resolve its strip with
    at least 8 cells (wall spacing <= c eps / 8).  Norms that vanish for
    every eps (e.g. the divergence of a parallel shear) are reported as
    passing with note ``zero``.
    """
    eps_list = np.asarray(eps_list, dtype=float)
    if len(grids) != eps_list.size or eps_list.size < 4:
        raise ConfigurationError("need one grid per eps and at least four eps values")
    values = {k: [] for k in SCALING_TARGETS}
    for grid, eps in zip(grids, eps_list):
        h = grid.spacing[grid.wall_axis]
        if h > c * eps / 8.0 * (1.0 + 1e-12):
            raise ConfigurationError(f"eps={eps:g}: wall spacing {h:g} does not resolve the layer (needs <= {c * eps / 8:g})")
        ref = euler(grid) if callable(euler) else euler
        norms = layer_norms(build_layer(grid, ref, c, eps, cutoff), p)
        for k in values:
            values[k].append(norms[k])
    rows, slopes, passed = [], {}, {}
    for k, (desc, target_fn) in SCALING_TARGETS.items():
        vals = np.asarray(values[k])
        target = target_fn(p)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.all(np.abs(vals) <= zero_atol * scale):
            slope, ok, note = float("nan"), True, "zero"
        else:
            slope = loglog_slope(eps_list, vals).slope
            ok = bool(np.isfinite(slope) and abs(slope - target) <= tol)
            note = ""
        slopes[k] = slope
        passed[k] = ok
        for eps, v in zip(eps_list, vals):
            rows.append(ScalingRow(k, desc, float(eps), float(v), slope, target, tol, ok, note))
    return LayerScalingTable(tuple(rows), slopes, passed)
