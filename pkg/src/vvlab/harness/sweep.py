"""eps-sweeps: one shared Euler reference, one Navier-Stokes run per eps."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..diagnostics import diagnose
from ..errors import ConfigurationError, VVLabError
from ..fitting import loglog_slope
from ..layer import build_layer
from ..solver import FluidState, SolverConfig, euler_solve, ns_solve, output_times
from ..thermo import GasLaw
from ..viscosity import check_assumptions, make_law
from .presets import get_preset, steady_shear_trajectory

__all__ = ["SweepRow", "SweepReport", "run_sweep", "reference_trajectory", "well_prepared_data", "run_row"]

log = logging.getLogger(__name__)


def well_prepared_data(euler_init, layer, k=0):
    """rho_0 = rho_0^E and u_0 = U(0) = u_0^E - v_bl(0) on the layer grid.

    ``euler_init`` is the Euler state at t = 0 (restricted onto the layer
    grid when finer); the layer supplies v_bl at snapshot ``k``.
    """
    grid = layer.grid
    if euler_init.grid != grid:
        from ..solver.grid import restrict

        if euler_init.grid.lengths != grid.lengths:
            raise ConfigurationError("Euler data and layer live on different domains")
        rho = restrict(euler_init.rho, euler_init.grid, grid)
        m = restrict(euler_init.m, euler_init.grid, grid)
        euler_init = FluidState(grid, rho, m, euler_init.t)
    rho0 = euler_init.rho.copy()
    u0 = euler_init.m / rho0 - layer.v_bl[k]
    return FluidState(grid, rho0, rho0 * u0, euler_init.t)


def reference_trajectory(cfg, preset=None):
    """The shared Euler reference on the finest grid refined ``reference_refine`` times."""
    preset = preset or get_preset(cfg.preset)
    finest = preset.grid_for(min(cfg.eps_list), cfg.c, cfg.cells_per_layer)
    if preset.dim == 1:
        fine = finest.refine(cfg.reference_refine)
    else:
        fine = finest.refine((1, cfg.reference_refine))
    times = output_times(cfg.T, cfg.n_snapshots)
    scfg = SolverConfig(gamma=cfg.gamma, cfl=cfg.cfl)
    if cfg.reference == "exact":
        return steady_shear_trajectory(fine, times, scfg)
    return euler_solve(preset.init(fine), GasLaw(cfg.gamma), scfg, cfg.T, times)


@dataclass
class SweepRow:
    eps: float
    r1: float
    n: tuple
    status: str = "ok"
    criteria: dict = field(default_factory=dict)
    sup_relE: float = float("nan")
    tesi: float = float("nan")
    energy_defect_max: float = float("nan")
    energy_scale: float = float("nan")
    wp_kinetic: float = float("nan")
    gronwall_C: float = float("nan")
    gronwall_eta: float = float("nan")
    gronwall_residual: float = float("nan")
    gronwall_holds: bool = False
    luca: list = field(default_factory=list)
    relE_bound_ok: bool = False
    lambda_checks: int = 0
    lambda_violations: int = 0
    runtime: float = 0.0
    diagnostics: object = None
    final_state: object = None

    @property
    def ok(self):
        return self.status == "ok"


def run_row(cfg, eps, ref):
    """One Navier-Stokes run plus diagnostics; solver aborts mark the row failed."""
    t0 = time.perf_counter()
    preset = get_preset(cfg.preset)
    g = GasLaw(cfg.gamma)
    law = make_law(cfg.law, cfg.nu, cfg.gamma)
    grid = preset.grid_for(eps, cfg.c, cfg.cells_per_layer)
    r1 = cfg.r1(eps)
    row = SweepRow(float(eps), r1, grid.n)
    try:
        ref_c = ref.restrict(grid)
        layer = build_layer(grid, ref_c, cfg.c, eps, cfg.cutoff)
        init = well_prepared_data(ref_c.state(0), layer)
        row.wp_kinetic = grid.integrate(init.rho * np.sum((init.m / init.rho - ref_c.velocity()[0]) ** 2, axis=0))
        scfg = SolverConfig(gamma=cfg.gamma, eps=eps, r1=r1, cfl=cfg.cfl, debug=cfg.debug)
        traj = ns_solve(init, law, g, scfg, cfg.T, ref.times)
        rep = diagnose(traj, ref_c, law, g, cfg.c, cfg.cutoff, cfg.criteria)
    except VVLabError as exc:
        row.status = f"failed: {type(exc).__name__}: {exc}"
        row.runtime = time.perf_counter() - t0
        log.warning("eps=%g failed: %s", eps, exc)
        return row
    row.criteria = dict(rep.criteria)
    row.sup_relE = rep.sup_rel_energy
    row.tesi = rep.tesi
    row.energy_defect_max = rep.energy_defect_max
    row.energy_scale = rep.extra["energy0"]
    e0 = float(np.asarray(rep.series.get("relE_U"))[0])
    row.gronwall_C = rep.gronwall.C
    row.gronwall_eta = rep.gronwall.eta
    row.gronwall_residual = rep.gronwall.residual
    row.gronwall_holds = rep.gronwall.holds(rep.times, rep.series["relE_U"])
    row.luca = list(rep.luca)
    row.relE_bound_ok = rep.relE_bound_ok
    row.lambda_checks = traj.lambda_checks
    row.lambda_violations = traj.lambda_violations
    row.diagnostics = rep
    row.final_state = traj.state(len(traj) - 1)
    row.runtime = time.perf_counter() - t0
    log.info("eps=%g done in %.1fs (relE_U(0)=%.3e)", eps, row.runtime, e0)
    return row


@dataclass
class SweepReport:
    cfg: object
    rows: list
    fits: dict
    assumptions: object = None
    reference_info: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def ok_rows(self):
        return [r for r in self.rows if r.ok]

    def column(self, name):
        good = self.ok_rows
        if name.startswith("K_"):
            return np.array([r.criteria.get(name[2:], np.nan) for r in good])
        return np.array([getattr(r, name) for r in good])

    def verdicts(self):
        """Sweep-level acceptance checks as ``(name, passed, detail)`` triples."""
        cfg = self.cfg
        good = self.ok_rows
        out = []
        if len(good) < 2:
            out.append(("sweep_rows", False, f"only {len(good)} successful rows"))
            return out
        target = (cfg.gamma - 1.0) / cfg.gamma
        wp = self.fits["wp_kinetic"].slope
        out.append(("well_prepared_slope", bool(abs(wp - target) <= 0.1), f"slope {wp:.4f} target {target:.4f} +- 0.1"))
        for name in ("sup_relE", "tesi"):
            vals = self.column(name)
            dec = bool(np.all(np.diff(vals) < 0))
            s = self.fits[name].slope
            out.append((f"{name}_decreasing", dec and s > 0, f"strictly decreasing={dec}, fitted order {s:.4f}"))
        if "thm1" in cfg.criteria:
            vals = self.column("K_thm1")
            dec = bool(np.all(np.diff(vals) < 0))
            out.append(("thm1_decreasing", dec, "values " + ", ".join(f"{v:.6g}" for v in vals)))
        nviol = sum(1 for r in good for (_, lhs, rhs, ok) in r.luca if not ok)
        out.append(("luca", nviol == 0 and all(r.luca for r in good), f"{nviol} violations over {sum(len(r.luca) for r in good)} checks"))
        gw = all(np.isfinite(r.gronwall_C) and r.gronwall_holds for r in good)
        out.append(("gronwall", gw, "; ".join(f"C={r.gronwall_C:.4g} res={r.gronwall_residual:.2e}" for r in good)))
        out.append(("relE_layer_bound", all(r.relE_bound_ok for r in good), "E(.|u^E) <= 2E(.|U) + int rho|v_bl|^2"))
        out.append(("r1_to_zero", bool(np.all(np.diff([r.r1 for r in self.rows]) < 0)), f"a={cfg.drag_exponent}"))
        return out


FIT_COLUMNS = ("sup_relE", "tesi", "wp_kinetic")


def _fits(rows, cfg):
    good = [r for r in rows if r.ok]
    eps = np.array([r.eps for r in good])
    fits = {}
    for name in cfg.criteria:
        fits[f"K_{name}"] = loglog_slope(eps, [r.criteria.get(name, np.nan) for r in good])
    for name in FIT_COLUMNS:
        fits[name] = loglog_slope(eps, [getattr(r, name) for r in good])
    return fits


def run_sweep(cfg, reference=None, check_law=True):
    """Run every eps of ``cfg`` against one shared Euler reference.

    Rows are independent; with ``cfg.threads > 1`` they run in worker
    processes and are merged in eps order, so the report does not depend on
    scheduling.
    """
    law = make_law(cfg.law, cfg.nu, cfg.gamma)
    audit = check_assumptions(law)
    if check_law and not audit.passed:
        raise ConfigurationError(f"viscosity law {cfg.law} fails {audit.failed()} at nu={cfg.nu}")
    warnings = []
    if len(cfg.eps_list) < 2:
        warnings.append("single eps value: no slopes fitted")
    ref = reference if reference is not None else reference_trajectory(cfg)
    info = {"grid": ref.grid.n, "kind": ref.kind, "n_steps": ref.n_steps, **{k: v for k, v in ref.stats.items()}}
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            futures = [pool.submit(run_row, cfg, eps, ref) for eps in cfg.eps_list]
            rows = [f.result() for f in futures]
    else:
        rows = [run_row(cfg, eps, ref) for eps in cfg.eps_list]
    rows.sort(key=lambda r: -r.eps)
    return SweepReport(cfg, rows, _fits(rows, cfg) if len(rows) > 1 else {}, audit, info, warnings)
