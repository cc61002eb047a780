"""The symmetric viscous surrogate S_mu by two independent routes."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError, PreconditionError
from ..solver.weak import spatial_gradient
from ..viscosity import s_field

__all__ = ["s_mu", "s_mu_both", "frob2", "sueur_stress"]


def _sym(T):
    return 0.5 * (T + np.swapaxes(T, 0, 1))


def frob2(A, ncomp=2):
    """Pointwise squared Frobenius norm over the leading component axes."""
    return np.sum(A * A, axis=tuple(range(ncomp)))


def s_mu(state, law, grid, route="defT", rho_pos=1e-8):
    """S_mu with shape ``(dim, dim, *grid.shape)``.

    ``route='defT'`` evaluates the weak identity
        sqrt(mu) T = grad(sqrt(rho) u mu / sqrt(rho)) - sqrt(rho) u (x) sqrt(rho) grad s(rho)
    with discrete gradients and symmetrises T; ``route='closed'`` returns
    sqrt(mu(rho)) D(u) directly.  The two agree to discretisation order on
    smooth positive states.
    """
    rho = np.asarray(state.rho, dtype=float)
    if np.min(rho) < rho_pos:
        raise PreconditionError(f"S_mu needs rho >= {rho_pos:g}; got min rho = {np.min(rho):.3e}")
    u = state.m / rho
    mu = np.asarray(law.mu(rho), dtype=float)
    if route == "closed":
        return np.sqrt(mu) * _sym(spatial_gradient(grid, u))
    if route != "defT":
        raise ParameterError(f"unknown S_mu route {route!r}")
    sq = np.sqrt(rho)
    flux = (sq * u) * (mu / sq)
    grad_flux = spatial_gradient(grid, flux)
    grad_s = spatial_gradient(grid, s_field(law, rho))
    transport = np.einsum("i...,j...->ij...", sq * u, sq * grad_s)
    T = (grad_flux - transport) / np.sqrt(mu)
    return _sym(T)


def s_mu_both(state, law, grid, rho_pos=1e-8):
    return s_mu(state, law, grid, "defT", rho_pos), s_mu(state, law, grid, "closed", rho_pos)


def sueur_stress(grid, u):
    """grad u + grad u^T - (2/3) div u I (unit shear viscosity, no bulk part)."""
    G = spatial_gradient(grid, u)
    S = G + np.swapaxes(G, 0, 1)
    div = np.trace(G, axis1=0, axis2=1)
    for i in range(grid.dim):
        S[i, i] -= (2.0 / 3.0) * div
    return S
