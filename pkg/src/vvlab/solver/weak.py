"""Integral checks on stored trajectories: weak-form and energy residuals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from ..thermo import entropy_H, pressure
from ..viscosity import lambda_of

__all__ = [
    "bump_test_function",
    "weak_form_residual",
    "continuity_residual",
    "total_energy",
    "EnergyResidual",
    "energy_residual",
    "spatial_gradient",
]


def spatial_gradient(grid, f):
    """Second-order gradient of ``f`` (shape ``(..., *grid.shape)``).

    Periodic axes use centred differences with wrap-around; the wall axis
    uses one-sided second-order stencils at the boundary cells.  Returns an
    array with a new axis of length ``dim`` inserted just before the grid axes.
    """
    f = np.asarray(f, dtype=float)
    lead = f.ndim - grid.dim
    out = []
    for a, h in enumerate(grid.spacing):
        ax = lead + a
        if a in grid.periodic_axes:
            out.append((np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * h))
        else:
            out.append(np.gradient(f, h, axis=ax, edge_order=2))
    return np.stack(out, axis=lead)


def bump_test_function(grid, center, radius, component=0, amplitude=1.0):
    """Smooth compactly supported vector test field and its gradient.

    psi = amplitude * exp(1 - 1/(1 - q^2)) e_component for q = |x - center|/radius < 1.
    Returns ``(psi, grad)`` with ``grad[i, j] = d psi_i / d x_j``.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    X = grid.centers
    off = [X[a] - center[a] for a in range(grid.dim)]
    for a in grid.periodic_axes:
        L = grid.lengths[a]
        off[a] = (off[a] + 0.5 * L) % L - 0.5 * L
    q2 = sum(o * o for o in off) / radius ** 2
    inside = q2 < 1.0
    w = np.where(inside, 1.0 - q2, 1.0)
    b = np.where(inside, amplitude * np.exp(1.0 - 1.0 / w), 0.0)
    # d/dx_j exp(1 - 1/(1 - q^2)) = b * (-1/(1-q^2)^2) * 2 off_j / radius^2
    db = np.where(inside, -b / (w * w) * 2.0 / radius ** 2, 0.0)
    psi = np.zeros((grid.dim,) + grid.shape)
    psi[component] = b
    grad = np.zeros((grid.dim, grid.dim) + grid.shape)
    for j in range(grid.dim):
        grad[component, j] = db * off[j]
    return psi, grad


def _check_support(grid, psi):
    wall = grid.wall_axis
    edge = np.take(psi, [0, -1], axis=wall + 1)
    if np.any(edge != 0.0):
        raise PreconditionError("test function support touches the wall")


def _trapz(values, times):
    return float(np.trapezoid(values, times)) if hasattr(np, "trapezoid") else float(np.trapz(values, times))


def weak_form_residual(traj, law, g, cfg, test_fn):
    """Defect of the momentum identity tested against a time-independent field.

    With phi = psi(x) compactly supported in the open domain the identity reads

        int rho u(T) . psi - int rho u(0) . psi
            = int_0^T int (rho u x u + p I - eps(2 sqrt(mu) S_mu + lambda div u I)) : grad psi
              - int_0^T int r1 rho |u| u . psi,

    where sqrt(mu) S_mu = mu D(u) on smooth positive states.  ``test_fn`` is
    either a pair ``(psi, grad)`` or a callable ``grid -> (psi, grad)``.
    Returns the absolute defect summed over components.
    """
    grid = traj.grid
    psi, grad = test_fn(grid) if callable(test_fn) else test_fn
    psi = np.asarray(psi, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if not np.any(psi):
        return 0.0
    _check_support(grid, psi)
    from ..diagnostics.smu import s_mu

    vals = np.empty(traj.times.size)
    for k in range(traj.times.size):
        rho = traj.rho[k]
        m = traj.m[k]
        u = m / np.maximum(rho, cfg.rho_floor)
        flux = np.einsum("i...,j...->ij...", m, u)
        p = pressure(g, rho)
        for i in range(grid.dim):
            flux[i, i] += p
        if traj.eps > 0:
            mu = np.asarray(law.mu(rho), dtype=float)
            S = s_mu(traj.state(k), law, grid, route="closed")
            div = sum(spatial_gradient(grid, u[i])[i] for i in range(grid.dim))
            lam = lambda_of(law, rho)
            visc = 2.0 * np.sqrt(mu) * S
            for i in range(grid.dim):
                visc[i, i] += lam * div
            flux -= traj.eps * visc
        integrand = np.sum(flux * grad, axis=(0, 1))
        if traj.r1 > 0:
            speed = np.sqrt(np.sum(u * u, axis=0))
            integrand -= traj.r1 * rho * speed * np.sum(u * psi, axis=0)
        vals[k] = grid.integrate(integrand)
    lhs = grid.integrate(np.sum((traj.m[-1] - traj.m[0]) * psi, axis=0))
    return abs(lhs - _trapz(vals, traj.times))


def continuity_residual(traj, test_fn):
    """Defect of int rho(T) phi - int rho(0) phi = int_0^T int rho u . grad phi.

    ``test_fn`` returns a scalar field and its gradient (or a vector pair
    whose first component is used).
    """
    grid = traj.grid
    phi, grad = test_fn(grid) if callable(test_fn) else test_fn
    phi = np.asarray(phi, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if phi.ndim == grid.dim + 1:
        phi, grad = phi[0], grad[0]
    if not np.any(phi):
        return 0.0
    _check_support(grid, phi[None])
    vals = np.array([grid.integrate(np.sum(traj.m[k] * grad, axis=0)) for k in range(traj.times.size)])
    lhs = grid.integrate((traj.rho[-1] - traj.rho[0]) * phi)
    return abs(lhs - _trapz(vals, traj.times))


def total_energy(grid, rho, m, g, rho_floor=1e-10):
    """int (1/2 |m|^2 / rho + H(rho))."""
    kin = 0.5 * np.sum(m * m, axis=0) / np.maximum(rho, rho_floor)
    return grid.integrate(kin + entropy_H(g, rho))


@dataclass(frozen=True)
class EnergyResidual:
    times: np.ndarray
    energy: np.ndarray
    defect: np.ndarray
    tol: float

    @property
    def max_defect(self):
        return float(np.max(self.defect))

    @property
    def passed(self):
        return self.max_defect <= self.tol


def energy_residual(traj, law, g, cfg, tol=None):
    """defect(tau) = E(tau) + eps nu int int mu|D u|^2 + r1 int int rho|u|^3 - E(0).

    The dissipation integrals come from the per-step accumulators stored on
    the trajectory.  ``tol`` defaults to 1e-6 E(0); a positive defect beyond
    it signals an energy-unstable run.
    """
    E = np.array([
        total_energy(traj.grid, traj.rho[k], traj.m[k], g, cfg.rho_floor) for k in range(traj.times.size)
    ])
    defect = E + traj.visc_diss + traj.drag_diss - E[0]
    if tol is None:
        tol = 1e-6 * abs(E[0])
    return EnergyResidual(traj.times, E, defect, float(tol))
