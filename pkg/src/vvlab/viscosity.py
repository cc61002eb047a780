"""Density-dependent viscosity laws and their structural assumptions.

A law is given by mu(rho) and mu'(rho) (optionally mu''(rho)); the second
coefficient is always derived, lambda = 2 (rho mu' - mu).  The module also
audits the structural inequalities the convergence argument relies on and
fits the constants of the resulting power-type bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, DomainError, EvaluationError, ParameterError

__all__ = [
    "ViscosityLaw",
    "AssumptionCheck",
    "AssumptionReport",
    "make_law",
    "lambda_of",
    "lambda_prime",
    "s_of",
    "s_field",
    "check_assumptions",
    "default_samples",
    "nu_range",
    "exponent_feasible",
]

FD_REL_STEP = 1e-6
FIT_INFLATION = 1.01


def nu_range(gamma):
    """Admissible interval [1/(3 gamma - 2), 1) for nu."""
    return 1.0 / (3.0 * gamma - 2.0), 1.0


def exponent_feasible(gamma, nu):
    """True when 2/3 + 1/(3 nu) <= gamma, the exponent bound behind the viscous estimates."""
    return 2.0 / 3.0 + 1.0 / (3.0 * nu) <= gamma * (1.0 + 1e-14)


@dataclass(frozen=True)
class ViscosityLaw:
    """A viscosity pair (mu, lambda) with lambda = 2 (rho mu' - mu).

    ``lam`` is an optional independent closed form of lambda; when present
    the audit cross-checks it against the derived value.  ``s`` is an optional
    closed form of the primitive with s' = mu'/rho and s(1) = 0.
    """

    mu: Callable
    mu_prime: Callable
    nu: float
    gamma: float
    mu_second: Optional[Callable] = None
    name: str = "custom"
    lam: Optional[Callable] = field(default=None, compare=False)
    s: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ParameterError(f"gamma must exceed 1, got {self.gamma}")

    def lam_of(self, rho):
        return lambda_of(self, rho)


def _power(beta):
    beta = float(beta)

    def s(r):
        r = np.asarray(r, dtype=float)
        if beta == 1.0:
            return np.log(r)
        return beta / (beta - 1.0) * (r ** (beta - 1.0) - 1.0)

    return dict(
        mu=lambda r: np.asarray(r, dtype=float) ** beta,
        mu_prime=lambda r: beta * np.asarray(r, dtype=float) ** (beta - 1.0),
        mu_second=lambda r: beta * (beta - 1.0) * np.asarray(r, dtype=float) ** (beta - 2.0),
        lam=lambda r: 2.0 * (beta - 1.0) * np.asarray(r, dtype=float) ** beta,
        s=s,
    )


def _affine(a, b):
    a, b = float(a), float(b)
    return dict(
        mu=lambda r: a + b * np.asarray(r, dtype=float),
        mu_prime=lambda r: b + 0.0 * np.asarray(r, dtype=float),
        mu_second=lambda r: 0.0 * np.asarray(r, dtype=float),
        lam=lambda r: -2.0 * a + 0.0 * np.asarray(r, dtype=float),
        s=lambda r: b * np.log(np.asarray(r, dtype=float)),
    )


def make_law(spec, nu, gamma):
    """Build a registered law from its configuration name.

    ``linear`` (mu = rho), ``power:beta`` (mu = rho**beta) and
    ``affine:a,b`` (mu = a + b rho) are recognised.
    """
    head, _, arg = str(spec).strip().partition(":")
    head = head.strip().lower()
    try:
        if head == "linear" and not arg:
            parts = _power(1.0)
        elif head == "power":
            parts = _power(float(arg))
        elif head == "affine":
            a, b = (float(v) for v in arg.split(","))
            parts = _affine(a, b)
        else:
            raise ParameterError(f"unknown viscosity law {spec!r}")
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"malformed viscosity law {spec!r}") from exc
    return ViscosityLaw(nu=float(nu), gamma=float(gamma), name=str(spec).strip(), **parts)


def lambda_of(law, rho):
    """lambda(rho) = 2 (rho mu'(rho) - mu(rho))."""
    rho = np.asarray(rho, dtype=float)
    mu = np.asarray(law.mu(rho), dtype=float)
    mup = np.asarray(law.mu_prime(rho), dtype=float)
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(mup))):
        raise EvaluationError(f"non-finite mu or mu' for law {law.name!r}")
    out = 2.0 * (rho * mup - mu)
    return out if out.ndim else float(out)


def lambda_prime(law, rho):
    """lambda'(rho) = 2 rho mu''(rho), or a centred difference when mu'' is unknown."""
    rho = np.asarray(rho, dtype=float)
    if law.mu_second is not None:
        return 2.0 * rho * np.asarray(law.mu_second(rho), dtype=float)
    h = FD_REL_STEP * np.maximum(np.abs(rho), FD_REL_STEP)
    lo = np.maximum(rho - h, 0.0)
    hi = rho + h
    return (lambda_of(law, hi) - lambda_of(law, lo)) / (hi - lo)


def s_of(law, rho, rho_ref=1.0):
    """Primitive s(rho) = integral of mu'(sigma)/sigma from rho_ref to rho (adaptive quadrature)."""
    if not (rho > 0 and rho_ref > 0):
        raise DomainError("s(rho) is only defined for rho > 0 and rho_ref > 0")
    if rho == rho_ref:
        return 0.0
    # integrate in log-density: ds = mu'(e^t) dt
    val, _ = integrate.quad(
        lambda t: float(law.mu_prime(np.exp(t))),
        np.log(rho_ref),
        np.log(rho),
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return val


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


def s_field(law, rho, rho_ref=1.0):
    """Vectorised s(rho) for density fields.

    Uses the closed form when the law carries one, otherwise fixed 48-point
    Gauss-Legendre quadrature in log-density (smooth integrand).
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("s(rho) requires rho > 0")
    if law.s is not None:
        base = law.s(np.asarray(rho_ref, dtype=float))
        return np.asarray(law.s(rho), dtype=float) - base
    a = np.log(rho_ref)
    b = np.log(rho)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[..., None] + half[..., None] * _GL_NODES
    vals = np.asarray(law.mu_prime(np.exp(t)), dtype=float)
    return half * np.sum(vals * _GL_WEIGHTS, axis=-1)


def default_samples(rho_max=10.0, n=2000, rho_min=1e-6):
    """Log-spaced densities on [rho_min, rho_max] with the branch point rho = 1 inserted."""
    pts = np.geomspace(rho_min, rho_max, n)
    return np.unique(np.concatenate([pts, [1.0]]))


@dataclass
class AssumptionCheck:
    """Outcome of one inequality: signed worst margin and where it occurs."""

    name: str
    passed: bool
    margin: float
    rho_at: float
    note: str = ""


@dataclass
class AssumptionReport:
    law: str
    gamma: float
    nu: float
    checks: dict
    c1_low: float
    c1_high: float
    c2: float
    theta: float

    @property
    def c1(self):
        return max(self.c1_low, self.c1_high)

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failed(self):
        return [k for k, c in self.checks.items() if not c.passed]

    def lines(self):
        out = [f"law={self.law} gamma={self.gamma:g} nu={self.nu:g}"]
        for c in self.checks.values():
            flag = "pass" if c.passed else "FAIL"
            tail = f" ({c.note})" if c.note else ""
            out.append(f"  {c.name:<12s} {flag}  margin={c.margin:+.6e} at rho={c.rho_at:.6g}{tail}")
        out.append(f"  c1(rho<=1)={self.c1_low:.6g} c1(rho>=1)={self.c1_high:.6g} c2={self.c2:.6g}")
        return out


def _worst(name, slack, rho, note=""):
    k = int(np.argmin(slack))
    m = float(slack[k])
    return AssumptionCheck(name, m >= 0.0, m, float(rho[k]), note)


def check_assumptions(law, rho_samples=None, theta=0.01, rho_max=10.0):
    """Audit the structural assumptions on a density sample set.

    Each inequality is evaluated at every sample; the reported margin is the
    smallest signed slack (rhs - lhs), so a failed check always carries a
    negative margin.  The growth condition at large density is only tested
    when gamma >= 3, through the finite proxy
    min_{rho in [rho_max/2, rho_max]} mu(rho) / rho**(gamma/3 + theta) > 0.
    """
    if rho_samples is None:
        rho_samples = default_samples(rho_max)
    rho = np.asarray(rho_samples, dtype=float).ravel()
    if rho.size == 0:
        raise ConfigurationError("empty density sample set")
    lo, hi = nu_range(law.gamma)
    if not (lo - 1e-15 <= law.nu < hi):
        raise ParameterError(f"nu={law.nu} outside [{lo:.6g}, 1) for gamma={law.gamma}")

    pos = rho[rho > 0]
    if pos.size == 0:
        raise ConfigurationError("sample set has no positive densities")
    mu = np.asarray(law.mu(pos), dtype=float)
    mup = np.asarray(law.mu_prime(pos), dtype=float)
    lam = lambda_of(law, pos)
    lamp = lambda_prime(law, pos)
    nu = law.nu
    checks = {}

    if law.lam is not None:
        ref = np.asarray(law.lam(pos), dtype=float)
        tol = 1e-12 * np.maximum(1.0, np.abs(ref))
        checks["lm"] = _worst("lm", tol - np.abs(ref - lam), pos, "closed-form lambda vs 2(rho mu' - mu)")
    checks["ass1_dmu"] = _worst("ass1_dmu", mup - nu, pos, "mu' >= nu")
    mu0 = float(law.mu(np.asarray(0.0)))
    checks["ass1_mu0"] = AssumptionCheck("ass1_mu0", mu0 >= 0.0, mu0, 0.0, "mu(0) >= 0")
    checks["ass2"] = _worst("ass2", mup / nu - np.abs(lamp), pos, "|lambda'| <= mu'/nu")
    comb = 2.0 * mu + 3.0 * lam
    checks["ass3_lower"] = _worst("ass3_lower", comb - nu * mu, pos, "nu mu <= 2mu + 3lambda")
    checks["ass3_upper"] = _worst("ass3_upper", mu / nu - comb, pos, "2mu + 3lambda <= mu/nu")
    if law.gamma >= 3:
        rmax = pos.max()
        tail = pos[pos >= 0.5 * rmax]
        proxy = np.asarray(law.mu(tail), dtype=float) / tail ** (law.gamma / 3.0 + theta)
        k = int(np.argmin(proxy))
        checks["ass4"] = AssumptionCheck(
            "ass4", bool(proxy[k] > 0), float(proxy[k]), float(tail[k]),
            f"finite proxy of liminf with theta={theta:g}",
        )

    low = pos <= 1.0
    high = pos >= 1.0
    c1_low = c1_high = 0.0
    if np.any(low):
        c1_low = FIT_INFLATION * float(np.max(mu[low] / pos[low] ** (2.0 / 3.0 + nu / 3.0)))
    if np.any(high):
        c1_high = FIT_INFLATION * float(np.max(mu[high] / pos[high] ** (2.0 / 3.0 + 1.0 / (3.0 * nu))))
    nz = mu > 0
    c2 = FIT_INFLATION * float(np.max(np.abs(lam[nz]) / mu[nz])) if np.any(nz) else 0.0
    return AssumptionReport(law.name, law.gamma, nu, checks, c1_low, c1_high, c2, theta)
