"""Sweep configuration: a plain key = value file plus command-line overrides.

Recognised keys (defaults in parentheses)::

    preset          bump1d | channel2d            (bump1d)
    eps_list        comma-separated, decreasing   (2^-4 ... 2^-9)
    drag_exponent   a in r1 = eps^a               (1)
    c               strip constant                (1)
    gamma           adiabatic exponent            (2)
    nu              lower viscosity constant      (0.5)
    law             linear | power:b | affine:a,b (linear)
    cutoff          smoothstep | bump             (smoothstep)
    T               final time                    (0.2)
    n_snapshots     stored intervals              (40)
    cells_per_layer wall cells per strip width    (8)
    reference_refine  Euler grid refinement       (4)
    reference       solve | exact                 (solve; exact only for channel2d)
    cfl             CFL number                    (0.4)
    criteria        comma-separated subset        (all)
    threads         worker processes              (1)
    out             output directory              (vvlab_out)
    debug           check the dissipation floor at every face (0)

Blank lines and text after ``#`` are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..diagnostics.functionals import CRITERIA
from ..errors import ConfigurationError, ParameterError
from ..viscosity import nu_range
from .presets import PRESETS

__all__ = ["SweepConfig", "load_config", "parse_config_text", "DEFAULT_EPS"]

DEFAULT_EPS = tuple(2.0 ** -k for k in range(4, 10))


def _floats(s):
    if isinstance(s, (list, tuple)):
        return tuple(float(v) for v in s)
    return tuple(float(eval_number(v)) for v in str(s).replace(";", ",").split(",") if v.strip())


def eval_number(text):
    """Parse a number; also accepts fractions (``4/3``) and powers (``2^-4``, ``2**-4``)."""
    t = text.strip().replace("**", "^")
    if "^" in t:
        base, _, exp = t.partition("^")
        return float(Fraction(base)) ** float(Fraction(exp))
    return float(Fraction(t))


@dataclass(frozen=True)
class SweepConfig:
    preset: str = "bump1d"
    eps_list: tuple = DEFAULT_EPS
    drag_exponent: float = 1.0
    c: float = 1.0
    gamma: float = 2.0
    nu: float = 0.5
    law: str = "linear"
    cutoff: str = "smoothstep"
    T: float = 0.2
    n_snapshots: int = 40
    cells_per_layer: int = 8
    reference_refine: int = 4
    reference: str = "solve"
    cfl: float = 0.4
    criteria: tuple = CRITERIA
    threads: int = 1
    out: str = "vvlab_out"
    debug: bool = False

    def __post_init__(self):
        eps = np.asarray(self.eps_list, dtype=float)
        if eps.size == 0 or np.any(eps <= 0):
            raise ConfigurationError("eps_list must contain positive values")
        if np.any(np.diff(eps) >= 0):
            raise ConfigurationError("eps_list must be strictly decreasing")
        if self.preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {self.preset!r}")
        lo, hi = nu_range(self.gamma)
        if not (lo <= self.nu < hi):
            raise ParameterError(f"nu={self.nu} outside [{lo:.6g}, 1) for gamma={self.gamma}")
        if self.drag_exponent <= 0:
            raise ConfigurationError("drag exponent must be positive so that r1 -> 0")
        if self.c <= 0 or self.T <= 0 or self.n_snapshots < 2:
            raise ConfigurationError("c, T must be positive and n_snapshots >= 2")
        if self.cells_per_layer < 8:
            raise ConfigurationError("the strip must be resolved by at least 8 cells")
        if self.reference_refine < 1:
            raise ConfigurationError("reference_refine must be >= 1")
        if self.reference not in ("solve", "exact"):
            raise ConfigurationError("reference must be 'solve' or 'exact'")
        if self.reference == "exact" and self.preset != "channel2d":
            raise ConfigurationError("an exact Euler reference is only available for channel2d")
        unknown = set(self.criteria) - set(CRITERIA)
        if unknown:
            raise ConfigurationError(f"unknown criteria {sorted(unknown)}")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    def r1(self, eps):
        return float(eps) ** self.drag_exponent

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def lines(self):
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            out.append(f"{f.name} = {v}")
        return out


_CONVERT = {
    "eps_list": _floats,
    "criteria": lambda s: tuple(v.strip() for v in str(s).split(",") if v.strip()),
    "debug": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"),
    "n_snapshots": int,
    "cells_per_layer": int,
    "reference_refine": int,
    "threads": int,
    **{k: lambda s: eval_number(str(s)) for k in ("drag_exponent", "c", "gamma", "nu", "T", "cfl")},
}


def coerce(key, value):
    names = {f.name for f in fields(SweepConfig)}
    if key not in names:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    conv = _CONVERT.get(key, str)
    try:
        return conv(value)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {value!r} ({exc})") from None


def parse_config_text(text):
    kw = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigurationError(f"line {num}: expected 'key = value', got {raw!r}")
        kw[key.strip()] = coerce(key.strip(), val.strip())
    return kw


def load_config(path=None, **overrides):
    """Build a :class:`SweepConfig` from an optional file and keyword overrides."""
    kw = {}
    if path is not None:
        path = Path(path)
        try:
            kw = parse_config_text(path.read_text())
        except OSError as exc:
            raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    kw.update({k: (coerce(k, v) if isinstance(v, str) else v) for k, v in overrides.items() if v is not None})
    return SweepConfig(**kw)
