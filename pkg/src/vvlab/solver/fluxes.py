"""Semi-discrete right-hand sides.

Convection uses a local Lax-Friedrichs (Rusanov) flux on limited linear
reconstructions of (rho, u); the viscous stress 2 eps mu D(u) + eps lambda
div(u) I is evaluated with centred differences at cell faces; drag is a
pointwise sink.  Walls are imposed through ghost cells: density is mirrored
(zero normal gradient), the normal velocity is reflected, and the tangential
velocity is reflected for no-slip or mirrored for slip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IntegrationError
from ..thermo import pressure
from ..viscosity import lambda_of

__all__ = [
    "ns_rhs",
    "euler_rhs",
    "rhs",
    "Dissipation",
    "pad_fields",
    "face_gradients",
]


@dataclass
class Dissipation:
    """Space integrals of the dissipation densities at one rhs evaluation."""

    nu_visc: float = 0.0          # eps nu int mu |D u|^2
    full_visc: float = 0.0        # eps int (2 mu |D u|^2 + lambda |div u|^2)
    drag: float = 0.0             # r1 int rho |u|^3
    faces: int = 0
    violations: int = 0


def _pad_axis(a, axis, ng, mode, parity=1.0):
    """Ghost layers along ``axis``: periodic wrap or wall mirror with ``parity``."""
    a = np.moveaxis(a, axis, -1)
    if mode == "wrap":
        out = np.concatenate([a[..., -ng:], a, a[..., :ng]], axis=-1)
    else:
        left = parity * a[..., ng - 1::-1]
        right = parity * a[..., : -ng - 1 : -1]
        out = np.concatenate([left, a, right], axis=-1)
    return np.moveaxis(out, -1, axis)


def pad_fields(grid, rho, u, ng, bc, axes=None):
    """Pad density and velocity with ``ng`` ghost layers along ``axes``.

    Periodic axes are padded before the wall axis so channel corners are
    consistent.
    """
    if axes is None:
        axes = tuple(range(grid.dim))
    order = [a for a in axes if a != grid.wall_axis] + [a for a in axes if a == grid.wall_axis]
    for ax in order:
        if ax == grid.wall_axis:
            rho = _pad_axis(rho, ax, ng, "wall", 1.0)
            comps = []
            for k in range(grid.dim):
                par = -1.0 if (k == ax or bc == "noslip") else 1.0
                comps.append(_pad_axis(u[k], ax, ng, "wall", par))
            u = np.stack(comps)
        else:
            rho = _pad_axis(rho, ax, ng, "wrap")
            u = np.stack([_pad_axis(u[k], ax, ng, "wrap") for k in range(grid.dim)])
    return rho, u


def _minmod(a, b):
    return np.where(a * b > 0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _slopes(w, limiter):
    d = np.diff(w, axis=-1)
    if limiter == "minmod":
        return _minmod(d[..., :-1], d[..., 1:])
    if limiter == "none":
        return 0.5 * (d[..., :-1] + d[..., 1:])
    return np.zeros_like(d[..., :-1])


def _convective_axis(grid, rho, u, g, axis, cfg, bc):
    """Flux divergence along one axis; returns (d rho/dt, d m/dt)."""
    dx = grid.spacing[axis]
    rp, up = pad_fields(grid, rho, u, 2, bc, axes=(axis,))
    rp = np.moveaxis(rp, axis, -1)
    up = np.moveaxis(up, axis + 1, -1)
    sr = _slopes(rp, cfg.limiter)           # cells 1 .. n+2 of the padded array
    su = _slopes(up, cfg.limiter)
    rc, uc = rp[..., 1:-1], up[..., 1:-1]
    rL = (rc + 0.5 * sr)[..., :-1]
    rR = (rc - 0.5 * sr)[..., 1:]
    uL = (uc + 0.5 * su)[..., :-1]
    uR = (uc - 0.5 * su)[..., 1:]
    pL, pR = pressure(g, rL), pressure(g, rR)
    unL, unR = uL[axis], uR[axis]
    cL = np.sqrt(g.gamma * np.maximum(rL, 0.0) ** (g.gamma - 1.0))
    cR = np.sqrt(g.gamma * np.maximum(rR, 0.0) ** (g.gamma - 1.0))
    s = np.maximum(np.abs(unL) + cL, np.abs(unR) + cR)

    f_rho = 0.5 * (rL * unL + rR * unR) - 0.5 * s * (rR - rL)
    mL, mR = rL * uL, rR * uR
    f_m = 0.5 * (mL * unL + mR * unR) - 0.5 * s * (mR - mL)
    f_m[axis] += 0.5 * (pL + pR)

    d_rho = -(f_rho[..., 1:] - f_rho[..., :-1]) / dx
    d_m = -(f_m[..., 1:] - f_m[..., :-1]) / dx
    return np.moveaxis(d_rho, -1, axis), np.moveaxis(d_m, -1, axis + 1)


def face_gradients(grid, rho, u, bc="noslip"):
    """Velocity gradients and densities at cell faces.

    Returns a list with one entry per face family (one per axis); each entry
    is ``(rho_face, grad, weights)`` with ``grad[i, j] = d u_i / d x_j`` on
    that family and quadrature ``weights`` (1/2 on wall faces).
    """
    dim = grid.dim
    h = grid.spacing
    rp, up = pad_fields(grid, rho, u, 1, bc)
    out = []
    if dim == 1:
        rf = 0.5 * (rp[:-1] + rp[1:])
        grad = ((up[:, 1:] - up[:, :-1]) / h[0])[:, None]
        w = np.ones(rf.shape)
        w[0] = w[-1] = 0.5
        out.append((rf, grad, w))
        return out
    nx, ny = grid.shape
    # x-faces: between padded columns k, k+1 for k = 0..nx, interior rows
    a = up[:, :-1, 1:-1]
    b = up[:, 1:, 1:-1]
    rf = 0.5 * (rp[:-1, 1:-1] + rp[1:, 1:-1])
    ddx = (b - a) / h[0]
    ddy = (up[:, :-1, 2:] - up[:, :-1, :-2] + up[:, 1:, 2:] - up[:, 1:, :-2]) / (4.0 * h[1])
    grad = np.stack([ddx, ddy], axis=1)
    w = np.ones(rf.shape)
    w[-1, :] = 0.0          # periodic duplicate of the first face
    out.append((rf, grad, w))
    # y-faces: between padded rows k, k+1 for k = 0..ny, interior columns
    a = up[:, 1:-1, :-1]
    b = up[:, 1:-1, 1:]
    rf = 0.5 * (rp[1:-1, :-1] + rp[1:-1, 1:])
    ddy = (b - a) / h[1]
    ddx = (up[:, 2:, :-1] - up[:, :-2, :-1] + up[:, 2:, 1:] - up[:, :-2, 1:]) / (4.0 * h[0])
    grad = np.stack([ddx, ddy], axis=1)
    w = np.ones(rf.shape)
    w[:, 0] = w[:, -1] = 0.5
    out.append((rf, grad, w))
    return out


def _viscous(grid, rho, u, law, cfg, bc, diss):
    eps = cfg.eps
    dim = grid.dim
    h = grid.spacing
    fams = face_gradients(grid, rho, u, bc)
    d_m = np.zeros((dim,) + grid.shape)
    nfam = len(fams)
    for axis, (rf, grad, w) in enumerate(fams):
        mu = np.asarray(law.mu(rf), dtype=float)
        lam = lambda_of(law, rf)
        D = 0.5 * (grad + np.swapaxes(grad, 0, 1))
        div = np.trace(grad, axis1=0, axis2=1)
        tau = 2.0 * mu * D
        for k in range(dim):
            tau[k, k] += lam * div
        flux = eps * tau[:, axis]
        d_m += np.diff(flux, axis=axis + 1) / h[axis]
        if diss is not None:
            D2 = np.sum(D * D, axis=(0, 1))
            full = 2.0 * mu * D2 + lam * div * div
            lower = law.nu * mu * D2
            dv = grid.cell_volume / nfam
            diss.nu_visc += eps * float(np.sum(w * lower)) * dv
            diss.full_visc += eps * float(np.sum(w * full)) * dv
            if cfg.debug:
                tol = 1e-12 * (np.abs(full) + np.abs(lower)) + 1e-300
                mask = w > 0
                diss.faces += int(np.count_nonzero(mask))
                diss.violations += int(np.count_nonzero((full - lower < -tol) & mask))
    return d_m


def rhs(state, law, g, cfg, bc="noslip", diss=None):
    """Full semi-discrete tendency (d rho/dt, d m/dt) for ``state``.

    Viscous and drag contributions are skipped (not multiplied by zero)
    when eps or r1 vanish, so the inviscid limit reproduces the Euler
    operator bit for bit.
    """
    grid = state.grid
    rho = state.rho
    u = state.m / np.maximum(rho, cfg.rho_floor)
    d_rho = np.zeros(grid.shape)
    d_m = np.zeros((grid.dim,) + grid.shape)
    for axis in range(grid.dim):
        dr, dm = _convective_axis(grid, rho, u, g, axis, cfg, bc)
        d_rho += dr
        d_m += dm
    if cfg.eps > 0:
        d_m += _viscous(grid, rho, u, law, cfg, bc, diss)
    if cfg.r1 > 0:
        speed = np.sqrt(np.sum(u * u, axis=0))
        d_m -= cfg.r1 * rho * speed * u
        if diss is not None:
            diss.drag += cfg.r1 * float(np.sum(rho * speed ** 3)) * grid.cell_volume
    if not (np.all(np.isfinite(d_rho)) and np.all(np.isfinite(d_m))):
        bad = np.flatnonzero(~np.isfinite(d_rho) | ~np.all(np.isfinite(d_m), axis=0))
        raise IntegrationError("non-finite flux", cell=int(bad[0]), time=state.t)
    return d_rho, d_m


def ns_rhs(state, law, g, cfg, diss=None):
    """Navier-Stokes tendency with no-slip walls."""
    return rhs(state, law, g, cfg, "noslip", diss)


def euler_rhs(state, g, cfg, bc="slip"):
    """Euler tendency (eps = r1 = 0) with slip walls by default."""
    return rhs(state, None, g, cfg.inviscid(), bc)
