"""Per-run diagnostics assembly and its text serialisation.

Document layout (all numbers with 17 significant digits)::

    # vvlab diagnostics v1
    [meta]
    key = value
    ...
    [series]
    t relE_U relE_uE layer_kinetic visc_diss energy_defect tesi R1 ... R7_hat_abs
    <one row per stored time>
    [summary]
    key = value
    ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from ..layer import build_layer, null_layer
from ..solver.weak import energy_residual
from .functionals import (
    CRITERIA,
    criterion,
    layer_region,
    luca_check,
    luca_exponents,
    metric_series,
    relative_energy,
)
from .gronwall import gronwall_fit
from .remainders import TERMS, remainder_terms

__all__ = ["DiagnosticsReport", "diagnose", "parse_report", "SERIES_COLUMNS"]

BASE_COLUMNS = ("t", "relE_U", "relE_uE", "layer_kinetic", "visc_diss", "energy_defect", "tesi")
SERIES_COLUMNS = BASE_COLUMNS + TERMS


@dataclass
class DiagnosticsReport:
    meta: dict
    series: dict                     # column name -> array over stored times
    criteria: dict                   # criterion name -> space-time integral
    luca: list                       # (ell, lhs, rhs, passed)
    gronwall: object
    remainder_totals: dict
    extra: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.series["t"]

    @property
    def sup_rel_energy(self):
        return float(np.max(self.series["relE_U"]))

    @property
    def tesi(self):
        return float(np.max(self.series["tesi"]))

    @property
    def energy_defect_max(self):
        return float(np.max(self.series["energy_defect"]))

    @property
    def relE_bound_ok(self):
        """E(.|rho^E, u^E) <= 2 E(.|rho^E, U) + int rho |v_bl|^2 at every snapshot."""
        s = self.series
        rhs = 2.0 * s["relE_U"] + s["layer_kinetic"]
        return bool(np.all(s["relE_uE"] <= rhs * (1.0 + 1e-12) + 1e-300))

    def summary(self):
        out = {f"K_{k}": v for k, v in self.criteria.items()}
        out.update({
            "sup_relE": self.sup_rel_energy,
            "tesi_metric": self.tesi,
            "energy_defect_max": self.energy_defect_max,
            "relE_layer_bound_ok": int(self.relE_bound_ok),
            "gronwall_C": self.gronwall.C,
            "gronwall_eta": self.gronwall.eta,
            "gronwall_residual": self.gronwall.residual,
            "gronwall_holds": int(self.gronwall.holds(self.times, self.series["relE_U"])),
        })
        for i, (ell, lhs, rhs, ok) in enumerate(self.luca):
            out[f"luca{i}_ell"] = ell
            out[f"luca{i}_lhs"] = lhs
            out[f"luca{i}_rhs"] = rhs
            out[f"luca{i}_ok"] = int(ok)
        out.update({f"int_{k}": v for k, v in self.remainder_totals.items()})
        out.update(self.extra)
        return out

    def to_text(self):
        lines = ["# vvlab diagnostics v1", "[meta]"]
        lines += [f"{k} = {_fmt(v)}" for k, v in self.meta.items()]
        lines.append("[series]")
        cols = [c for c in SERIES_COLUMNS if c in self.series]
        lines.append(" ".join(cols))
        table = np.column_stack([self.series[c] for c in cols])
        lines += [" ".join(f"{x:.17g}" for x in row) for row in table]
        lines.append("[summary]")
        lines += [f"{k} = {_fmt(v)}" for k, v in self.summary().items()]
        return "\n".join(lines) + "\n"

    def write(self, path):
        path = Path(path)
        try:
            path.write_text(self.to_text())
        except OSError as exc:
            raise OSError(f"cannot write diagnostics to {path}: {exc}") from exc
        return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _value(s):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_report(text):
    """Inverse of :meth:`DiagnosticsReport.to_text`: returns (meta, series, summary)."""
    meta, summary, series = {}, {}, {}
    section = None
    header = None
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if section in ("meta", "summary"):
            k, _, v = line.partition("=")
            (meta if section == "meta" else summary)[k.strip()] = _value(v.strip())
        elif section == "series":
            if header is None:
                header = line.split()
            else:
                rows.append([float(x) for x in line.split()])
        else:
            raise ConfigurationError(f"unexpected line outside a section: {line!r}")
    if header is not None:
        arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
        series = {c: arr[:, i] for i, c in enumerate(header)}
    return meta, series, summary


def diagnose(traj, euler, law, g, c=1.0, cutoff=None, criteria=CRITERIA, use_layer=True, extra_meta=None):
    """Evaluate every diagnostic of one Navier-Stokes run against ``euler``.

    ``euler`` must share the snapshot times of ``traj``; it is restricted to
    the trajectory grid when finer.
    """
    grid = traj.grid
    ref = euler.restrict(grid) if euler.grid != grid else euler
    traj.check_compatible(ref)
    eps = traj.eps
    layer = build_layer(grid, ref, c, eps, cutoff) if use_layer and eps > 0 else null_layer(grid, ref)
    nt = traj.times.size
    relU = np.empty(nt)
    relE = np.empty(nt)
    lk = np.empty(nt)
    for k in range(nt):
        st = traj.state(k)
        relU[k] = relative_energy(st, layer.rho_E[k], layer.U[k], g, traj.cfg.rho_floor)
        relE[k] = relative_energy(st, layer.rho_E[k], layer.u_E[k], g, traj.cfg.rho_floor)
        lk[k] = grid.integrate(st.rho * np.sum(layer.v_bl[k] ** 2, axis=0))
    rem = remainder_terms(traj, layer, law, g)
    energy = energy_residual(traj, law, g, traj.cfg)
    series = {
        "t": np.asarray(traj.times),
        "relE_U": relU,
        "relE_uE": relE,
        "layer_kinetic": lk,
        "visc_diss": np.asarray(traj.visc_diss),
        "energy_defect": energy.defect,
        "tesi": metric_series(traj, ref, g),
    }
    series.update(rem.rates)
    crit = {}
    luca = []
    if eps > 0:
        region = layer_region(grid, c, eps)
        crit = {name: criterion(name, traj, region, law, g) for name in criteria}
        for ell in luca_exponents(g.gamma, law.nu):
            lhs, rhs = luca_check(traj, region, g, ell)
            luca.append((float(ell), lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-12))))
    meta = {
        "eps": float(eps),
        "r1": float(traj.r1),
        "gamma": float(g.gamma),
        "nu": float(law.nu),
        "law": law.name,
        "c": float(c),
        "cutoff": layer.cutoff.name,
        "dim": grid.dim,
        "n": " ".join(str(k) for k in grid.n),
        "lengths": " ".join(repr(L) for L in grid.lengths),
        "n_steps": traj.n_steps,
        "lambda_checks": traj.lambda_checks,
        "lambda_violations": traj.lambda_violations,
    }
    if extra_meta:
        meta.update(extra_meta)
    return DiagnosticsReport(
        meta=meta,
        series=series,
        criteria=crit,
        luca=luca,
        gronwall=gronwall_fit(traj.times, relU),
        remainder_totals=rem.totals,
        extra={"energy0": float(energy.energy[0])},
    )
