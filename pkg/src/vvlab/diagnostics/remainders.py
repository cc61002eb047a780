"""Remainder terms of the relative-energy inequality.

Every term is evaluated at each stored time as a space integral (a rate);
time integrals use the trapezoid rule.  With v = v_bl and U = u^E - v:

    R1 = int rho ((u - u^E) . grad) u^E . (U - u)
    R2 = -int div u^E (p(rho) - p(rho^E) - p'(rho^E)(rho - rho^E))
    R3 = -int (rho^E - rho) v . grad H'(rho^E)
    R4 = int div v (p(rho) - p(rho^E))
    R5 = r1 int rho |u| u . U
    R6 = -int rho (dt v + (u . grad) v) . (U - u)
    R7 = eps int 2 (sqrt(mu) S_mu + lambda/(2 mu) tr(sqrt(mu) S_mu) I) : grad U

R6 = R6a + R6b + R6c + R6d with
    R6a = int rho dt v . (u - u^E),   R6b = int rho dt v . v,
    R6c = -int rho ((u . grad) v) . U,  R6d = int rho (u (x) u) : grad v,
and R6c = R6_tilde + R6_hat once grad v = z grad u^E + u^E (x) grad z is
inserted.  R7 splits into R7_tilde (the grad u^E part) and R7_hat (the
-grad v part); the *_abs entries bound them by eps int |sqrt(mu) S_mu| |grad .|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from ..solver.weak import spatial_gradient
from ..thermo import entropy_H_prime, pressure, pressure_prime
from ..viscosity import lambda_of
from .functionals import time_integral
from .smu import s_mu

__all__ = ["RemainderSeries", "remainder_terms", "TERMS"]

TERMS = (
    "R1", "R2", "R3", "R4", "R5", "R6", "R7",
    "R6a", "R6b", "R6c", "R6d", "R6_tilde", "R6_hat",
    "R7_tilde", "R7_hat", "R7_tilde_abs", "R7_hat_abs",
)


@dataclass(frozen=True)
class RemainderSeries:
    times: np.ndarray
    rates: dict
    totals: dict

    def total(self, name):
        return self.totals[name]


def _dot(a, b):
    return np.sum(a * b, axis=0)


def _ddot(A, B):
    return np.sum(A * B, axis=(0, 1))


def _advect(w, G):
    """(w . grad) f with G[i, j] = d f_i / d x_j."""
    return np.einsum("j...,ij...->i...", w, G)


def remainder_terms(traj, layer, law, g):
    """Rates and time integrals of R1..R7 and their sub-splits.

    ``layer`` supplies the Euler fields on the trajectory grid (built from
    the same snapshot times); use :func:`vvlab.layer.null_layer` for v = 0.
    R7 is only evaluated when eps > 0 and then needs a positive density.
    """
    grid = traj.grid
    if layer.grid != grid:
        raise PreconditionError("layer and trajectory live on different grids")
    if layer.times.shape != traj.times.shape or not np.allclose(layer.times, traj.times, rtol=0, atol=1e-12):
        raise PreconditionError("layer and trajectory snapshot times differ")
    if traj.times.size < 3:
        raise PreconditionError("time derivatives of the Euler fields need at least three snapshots")
    eps, r1 = traj.eps, traj.r1
    nt = traj.times.size
    rates = {k: np.zeros(nt) for k in TERMS}
    d = grid.d_wall
    nvec = grid.normal
    for k in range(nt):
        rho = traj.rho[k]
        u = traj.m[k] / np.maximum(rho, traj.cfg.rho_floor)
        rE = layer.rho_E[k]
        uE = layer.u_E[k]
        GE = layer.grad_uE[k]
        v = layer.v_bl[k]
        Gv = layer.grad_v[k]
        dv = layer.dt_v[k]
        U = layer.U[k]
        divE = np.trace(GE)
        divv = np.trace(Gv)
        U_minus_u = U - u

        rel_p = pressure(g, rho) - pressure(g, rE) - pressure_prime(g, rE) * (rho - rE)
        rates["R1"][k] = grid.integrate(rho * _dot(_advect(u - uE, GE), U_minus_u))
        rates["R2"][k] = -grid.integrate(divE * rel_p)
        if np.any(v):
            gradHp = spatial_gradient(grid, entropy_H_prime(g, rE))
            rates["R3"][k] = -grid.integrate((rE - rho) * _dot(v, gradHp))
            rates["R4"][k] = grid.integrate(divv * (pressure(g, rho) - pressure(g, rE)))
        if r1 > 0:
            speed = np.sqrt(_dot(u, u))
            rates["R5"][k] = r1 * grid.integrate(rho * speed * _dot(u, U))

        adv_v = _advect(u, Gv)
        rates["R6"][k] = -grid.integrate(rho * _dot(dv + adv_v, U_minus_u))
        rates["R6a"][k] = grid.integrate(rho * _dot(dv, u - uE))
        rates["R6b"][k] = grid.integrate(rho * _dot(dv, v))
        rates["R6c"][k] = -grid.integrate(rho * _dot(adv_v, U))
        rates["R6d"][k] = grid.integrate(rho * _ddot(np.einsum("i...,j...->ij...", u, u), Gv))
        rates["R6_tilde"][k] = -grid.integrate(rho * layer.z * _dot(U, _advect(u, GE)))
        rates["R6_hat"][k] = grid.integrate(rho * _dot(u, nvec) / d * layer.z_tilde * _dot(U, uE))

        if eps > 0:
            S = s_mu(traj.state(k), law, grid, "defT")
            mu = np.asarray(law.mu(rho), dtype=float)
            smu = np.sqrt(mu) * S
            stress = 2.0 * smu
            tr = np.trace(smu)
            lam = lambda_of(law, rho)
            for i in range(grid.dim):
                stress[i, i] += lam / mu * tr
            GU = GE - Gv
            rates["R7"][k] = eps * grid.integrate(_ddot(stress, GU))
            rates["R7_tilde"][k] = eps * grid.integrate(_ddot(stress, GE))
            rates["R7_hat"][k] = -eps * grid.integrate(_ddot(stress, Gv))
            norm_s = np.sqrt(_ddot(smu, smu))
            rates["R7_tilde_abs"][k] = eps * grid.integrate(norm_s * np.sqrt(_ddot(GE, GE)))
            rates["R7_hat_abs"][k] = eps * grid.integrate(norm_s * np.sqrt(_ddot(Gv, Gv)))
    totals = {name: time_integral(r, traj.times) for name, r in rates.items()}
    for r in rates.values():
        r.setflags(write=False)
    return RemainderSeries(np.asarray(traj.times), rates, totals)
