"""Solver state containers: instantaneous fields, configuration, trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigurationError, ParameterError, PreconditionError
from .grid import Grid, restrict

__all__ = ["FluidState", "SolverConfig", "Trajectory"]

LIMITERS = ("minmod", "none", "first")
FLUXES = ("rusanov",)


@dataclass
class FluidState:
    """Cell averages of density and momentum at time ``t``.

    ``m`` has shape ``(dim, *grid.shape)``.
    """

    grid: Grid
    rho: np.ndarray
    m: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.m = np.asarray(self.m, dtype=float)
        if self.m.ndim == self.rho.ndim:
            self.m = self.m[None]
        if self.rho.shape != self.grid.shape or self.m.shape != (self.grid.dim,) + self.grid.shape:
            raise PreconditionError(
                f"field shapes rho{self.rho.shape} m{self.m.shape} do not match grid {self.grid.shape}"
            )

    @classmethod
    def from_primitive(cls, grid, rho, u, t=0.0):
        rho = np.asarray(rho, dtype=float)
        u = np.asarray(u, dtype=float)
        if u.ndim == rho.ndim:
            u = u[None]
        return cls(grid, rho, rho * u, t)

    def velocity(self, rho_floor=1e-10):
        return self.m / np.maximum(self.rho, rho_floor)

    def copy(self):
        return FluidState(self.grid, self.rho.copy(), self.m.copy(), self.t)

    def validate(self):
        if not (np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.m))):
            raise PreconditionError("non-finite field values")
        if np.any(self.rho < 0):
            raise PreconditionError("negative density")


@dataclass(frozen=True)
class SolverConfig:
    """Numerical and physical parameters of one run.

    ``order`` selects forward Euler (1) or the two-stage SSP Runge-Kutta
    scheme (2).  ``visc_number`` bounds eps (2 mu + |lambda|) dt sum(1/dx^2) / rho.
    """

    gamma: float
    eps: float = 0.0
    r1: float = 0.0
    cfl: float = 0.4
    rho_floor: float = 1e-10
    flux: str = "rusanov"
    limiter: str = "minmod"
    order: int = 2
    visc_number: float = 0.5
    dt_min: float = 1e-12
    gradient_guard: float = 0.5
    debug: bool = False

    def __post_init__(self):
        if not self.gamma > 1:
            raise ParameterError("gamma must exceed 1")
        if self.eps < 0 or self.r1 < 0:
            raise ParameterError("eps and r1 must be non-negative")
        if not (0 < self.cfl < 1):
            raise ParameterError("CFL number must lie in (0, 1)")
        if not self.rho_floor > 0:
            raise ParameterError("rho_floor must be positive")
        if self.limiter not in LIMITERS:
            raise ParameterError(f"limiter must be one of {LIMITERS}")
        if self.flux not in FLUXES:
            raise ParameterError(f"flux must be one of {FLUXES}")
        if self.order not in (1, 2):
            raise ParameterError("time integrator order must be 1 or 2")

    def inviscid(self):
        return replace(self, eps=0.0, r1=0.0)


@dataclass
class Trajectory:
    """Stored snapshots of one run plus time-accumulated dissipation.

    ``visc_diss[k]`` is eps nu int_0^{t_k} int mu |D u|^2, ``full_diss[k]``
    the complete viscous dissipation eps int int (2 mu |D u|^2 + lambda |div u|^2)
    and ``drag_diss[k]`` = r1 int_0^{t_k} int rho |u|^3, all accumulated every
    step of the integrator.
    """

    grid: Grid
    times: np.ndarray
    rho: np.ndarray
    m: np.ndarray
    cfg: SolverConfig
    kind: str = "ns"
    law_name: str = ""
    nu: float = float("nan")
    visc_diss: np.ndarray = None
    full_diss: np.ndarray = None
    drag_diss: np.ndarray = None
    n_steps: int = 0
    lambda_checks: int = 0
    lambda_violations: int = 0
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        nt = self.times.size
        for name in ("visc_diss", "full_diss", "drag_diss"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(nt))
        for name in ("times", "rho", "m", "visc_diss", "full_diss", "drag_diss"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            setattr(self, name, arr)

    @property
    def eps(self):
        return self.cfg.eps

    @property
    def r1(self):
        return self.cfg.r1

    @property
    def gamma(self):
        return self.cfg.gamma

    def __len__(self):
        return self.times.size

    def velocity(self):
        return self.m / np.maximum(self.rho, self.cfg.rho_floor)[:, None]

    def state(self, k):
        return FluidState(self.grid, self.rho[k].copy(), self.m[k].copy(), float(self.times[k]))

    def restrict(self, coarse):
        """Conservatively average every snapshot onto ``coarse``."""
        if coarse == self.grid:
            return self
        return Trajectory(
            coarse,
            self.times,
            restrict(self.rho, self.grid, coarse),
            restrict(self.m, self.grid, coarse),
            self.cfg,
            kind=self.kind,
            law_name=self.law_name,
            nu=self.nu,
            visc_diss=self.visc_diss,
            full_diss=self.full_diss,
            drag_diss=self.drag_diss,
            n_steps=self.n_steps,
            stats=dict(self.stats, restricted_from=self.grid.n),
        )

    def check_compatible(self, other):
        if other.grid != self.grid:
            raise ConfigurationError(f"grid mismatch: {self.grid.n} vs {other.grid.n}")
        if other.times.shape != self.times.shape or not np.allclose(other.times, self.times, rtol=0, atol=1e-12):
            raise ConfigurationError("snapshot times differ between trajectories")

    @classmethod
    def from_states(cls, states, cfg, **kw):
        grid = states[0].grid
        return cls(
            grid,
            [s.t for s in states],
            np.stack([s.rho for s in states]),
            np.stack([s.m for s in states]),
            cfg,
            **kw,
        )
