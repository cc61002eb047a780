"""Explicit time integration of the Navier-Stokes and Euler systems."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import IntegrationError, ParameterError, SmoothnessError
from ..viscosity import lambda_of
from .fluxes import Dissipation, rhs
from .state import FluidState, Trajectory

__all__ = ["stable_dt", "ns_solve", "euler_solve", "output_times"]

log = logging.getLogger(__name__)


def output_times(T, n_snapshots):
    return np.linspace(0.0, T, int(n_snapshots) + 1)


def stable_dt(state, law, g, cfg):
    """Largest step satisfying both the convective CFL and the viscous bound.

    The two constraints are combined harmonically so each holds on its own.
    """
    grid = state.grid
    rho = state.rho
    u = state.m / np.maximum(rho, cfg.rho_floor)
    c = np.sqrt(g.gamma * np.maximum(rho, 0.0) ** (g.gamma - 1.0))
    rate = 0.0
    for a, h in enumerate(grid.spacing):
        rate += float(np.max(np.abs(u[a]) + c)) / h
    dt = cfg.cfl / rate if rate > 0 else np.inf
    if cfg.eps > 0:
        inv_h2 = sum(1.0 / h ** 2 for h in grid.spacing)
        kappa = cfg.eps * (2.0 * np.asarray(law.mu(rho)) + np.abs(lambda_of(law, rho)))
        vrate = float(np.max(kappa / np.maximum(rho, cfg.rho_floor))) * inv_h2
        if vrate > 0:
            dt_v = cfg.visc_number / vrate
            dt = 1.0 / (1.0 / dt + 1.0 / dt_v)
    return dt


def _check_positive(rho, cfg, t):
    k = int(np.argmin(rho))
    r = rho.flat[k]
    if not np.isfinite(r) or r < cfg.rho_floor:
        raise IntegrationError(f"positivity lost: rho={r:.3e} < floor {cfg.rho_floor:g}", cell=k, time=t)


def _gradient_blowup(state, cfg):
    u = state.m / np.maximum(state.rho, cfg.rho_floor)
    worst = 0.0
    for a in range(state.grid.dim):
        worst = max(worst, float(np.max(np.abs(np.diff(u, axis=a + 1)))))
    return worst


def _advance(init, law, g, cfg, T, times, bc, kind, guard):
    if not T > 0:
        raise ParameterError("final time must be positive")
    init.validate()
    times = output_times(T, 40) if times is None else np.asarray(times, dtype=float)
    if times[0] != 0.0 or abs(times[-1] - T) > 1e-12 * max(1.0, T):
        raise ParameterError("snapshot times must start at 0 and end at T")
    grid = init.grid
    _check_positive(init.rho, cfg, 0.0)

    rho = init.rho.copy()
    m = init.m.copy()
    t = 0.0
    acc = np.zeros(3)          # nu-weighted viscous, full viscous, drag
    snaps_r, snaps_m, snaps_acc = [rho.copy()], [m.copy()], [acc.copy()]
    faces = violations = 0
    steps = 0
    dt_seen = np.inf
    max_jump = 0.0
    for target in times[1:]:
        while t < target - 1e-14 * max(1.0, target):
            st = FluidState(grid, rho, m, t)
            dt = stable_dt(st, law, g, cfg)
            if dt < cfg.dt_min:
                raise IntegrationError(f"time step collapsed to {dt:.3e}", time=t)
            dt = min(dt, target - t)
            d0 = Dissipation()
            dr, dm = rhs(st, law, g, cfg, bc, d0)
            r1 = rho + dt * dr
            m1 = m + dt * dm
            _check_positive(r1, cfg, t + dt)
            if cfg.order == 2:
                d1 = Dissipation()
                dr1, dm1 = rhs(FluidState(grid, r1, m1, t + dt), law, g, cfg, bc, d1)
                rho = 0.5 * (rho + r1 + dt * dr1)
                m = 0.5 * (m + m1 + dt * dm1)
                _check_positive(rho, cfg, t + dt)
                acc += 0.5 * dt * np.array([d0.nu_visc + d1.nu_visc, d0.full_visc + d1.full_visc, d0.drag + d1.drag])
                faces += d0.faces + d1.faces
                violations += d0.violations + d1.violations
            else:
                rho, m = r1, m1
                acc += dt * np.array([d0.nu_visc, d0.full_visc, d0.drag])
                faces += d0.faces
                violations += d0.violations
            t += dt
            steps += 1
            dt_seen = min(dt_seen, dt)
            if guard:
                jump = _gradient_blowup(FluidState(grid, rho, m, t), cfg)
                max_jump = max(max_jump, jump)
                if jump > cfg.gradient_guard:
                    raise SmoothnessError(
                        f"velocity jump {jump:.3f} per cell exceeds {cfg.gradient_guard}: "
                        "final time is beyond the smooth regime",
                        time=t,
                    )
        t = float(target)
        snaps_r.append(rho.copy())
        snaps_m.append(m.copy())
        snaps_acc.append(acc.copy())
    acc_arr = np.array(snaps_acc)
    log.debug("%s run finished: %d steps, min dt %.3e", kind, steps, dt_seen)
    return Trajectory(
        grid,
        times,
        np.stack(snaps_r),
        np.stack(snaps_m),
        cfg,
        kind=kind,
        law_name=getattr(law, "name", ""),
        nu=getattr(law, "nu", float("nan")),
        visc_diss=acc_arr[:, 0],
        full_diss=acc_arr[:, 1],
        drag_diss=acc_arr[:, 2],
        n_steps=steps,
        lambda_checks=faces,
        lambda_violations=violations,
        stats={"dt_min": dt_seen, "max_velocity_jump": max_jump},
    )


def ns_solve(init, law, g, cfg, T, times=None):
    """Advance the Navier-Stokes system with no-slip walls up to ``T``.

    Snapshots are stored at ``times`` (default: 41 equispaced instants);
    the step is clipped to land on each of them.
    """
    return _advance(init, law, g, cfg, T, times, "noslip", "ns", guard=False)


def euler_solve(init, g, cfg, T, times=None):
    """Advance the Euler system (eps = r1 = 0) with slip walls.

    Aborts with :class:`SmoothnessError` once the velocity jumps by more
    than ``cfg.gradient_guard`` across a single cell.
    """
    return _advance(init, None, g, cfg.inviscid(), T, times, "slip", "euler", guard=True)
