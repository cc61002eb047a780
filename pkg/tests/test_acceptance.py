"""Acceptance gate: every criterion at its stated tolerance and time budget.

Each test prints exactly one PASS/FAIL line; the lines are repeated in the
terminal summary.  The default sweep is computed once per session.
"""

import time

import numpy as np
import pytest

from vvlab.diagnostics import luca_exponents, remainder_terms, s_mu
from vvlab.diagnostics.functionals import time_integral
from vvlab.fitting import loglog_slope
from vvlab.harness import SweepConfig, get_preset, run_sweep, steady_shear_trajectory
from vvlab.harness.presets import bump1d
from vvlab.layer import SCALING_TARGETS, build_layer, null_layer, verify_layer_scalings
from vvlab.solver import Grid, SolverConfig, Trajectory, energy_residual, euler_solve, ns_solve, output_times
from vvlab.thermo import GasLaw, fit_equivalence_constants, reference_gauge, relative_entropy
from vvlab.viscosity import check_assumptions, make_law

pytestmark = pytest.mark.slow
GAMMA = 2.0
EPS = tuple(2.0 ** -k for k in range(4, 10))


@pytest.fixture(scope="session")
def sweep():
    t0 = time.perf_counter()
    cfg = SweepConfig(preset="bump1d", gamma=GAMMA, nu=0.5, law="linear", c=1.0, drag_exponent=1.0, eps_list=EPS, T=0.2)
    rep = run_sweep(cfg)
    return rep, time.perf_counter() - t0


def test_criterion_1_viscosity_audit(verdict):
    t0 = time.perf_counter()
    ok_rep = check_assumptions(make_law("linear", 0.5, 4.0 / 3.0))
    bad_rep = check_assumptions(make_law("linear", 0.9, 4.0 / 3.0))
    dt = time.perf_counter() - t0
    margins = {k: c.margin for k, c in ok_rep.checks.items()}
    strict = all(m > 0 for m in margins.values())
    fails_ass3 = not bad_rep.checks["ass3_upper"].passed
    tight = ", ".join(f"{k}={m:.3g}" for k, m in margins.items() if not m > 0)
    verdict(
        "1",
        strict and fails_ass3 and dt < 1.0,
        f"strictly positive margins={strict} (non-positive: {tight or 'none'}), nu=0.9 fails ass3={fails_ass3}, {dt:.2f}s",
    )


def test_criterion_2_smu_identity(verdict):
    t0 = time.perf_counter()
    law = make_law("linear", 0.5, GAMMA)
    ns = (256, 512, 1024, 2048)
    errs = []
    for n in ns:
        st = bump1d(Grid.slab(n))
        a = s_mu(st, law, st.grid, "defT")
        b = s_mu(st, law, st.grid, "closed")
        errs.append(float(np.sqrt(np.sum((a - b) ** 2) / np.sum(b ** 2))))
    order = -loglog_slope(ns, errs).slope
    dt = time.perf_counter() - t0
    verdict("2", order >= 1.9 and errs[-1] < 1e-6 and dt < 10, f"order {order:.3f}, finest rel. error {errs[-1]:.3e}, {dt:.2f}s")


def test_criterion_3_energy_inequality(verdict):
    t0 = time.perf_counter()
    g = Grid.slab(1024)
    law = make_law("linear", 0.5, GAMMA)
    cfg = SolverConfig(GAMMA, eps=1e-2, r1=1e-2, debug=True)
    traj = ns_solve(bump1d(g), law, GasLaw(GAMMA), cfg, 0.2, output_times(0.2, 40))
    er = energy_residual(traj, law, GasLaw(GAMMA), cfg)
    dt = time.perf_counter() - t0
    ok = er.max_defect <= 1e-6 * er.energy[0] and traj.lambda_checks > 0 and traj.lambda_violations == 0
    verdict(
        "3",
        ok and dt < 30,
        f"max defect {er.max_defect:.3e} vs 1e-6 E(0) = {1e-6 * er.energy[0]:.3e}; "
        f"{traj.lambda_violations} dissipation-floor violations over {traj.lambda_checks} face checks, {dt:.1f}s",
    )


def test_criterion_4_relative_entropy(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    rho = rng.uniform(0.0, 10.0, 10 ** 6)
    r = rng.uniform(0.5, 2.0, 10 ** 6)
    nonneg = all(bool(np.all(relative_entropy(GasLaw(gm), rho, r) >= 0)) for gm in (1.4, GAMMA))
    closed = float(np.max(np.abs(relative_entropy(GasLaw(2.0), rho, r) - (rho - r) ** 2)))
    violations = 0
    fitted = []
    for gm in (1.4, GAMMA):
        g = GasLaw(gm)
        c = fit_equivalence_constants(g, (0.5, 2.0))
        fitted.append(f"gamma={gm:g}: c3={c.c3:.5g} c4={c.c4:.5g}")
        test_rho = rng.uniform(0.0, 2.0 * c.rho_cap, 10 ** 6)
        test_r = rng.uniform(0.5, 2.0, 10 ** 6)
        h = relative_entropy(g, test_rho, test_r)
        G = reference_gauge(g, test_rho, test_r)
        violations += int(np.count_nonzero((h < c.c3 * G) | (h > c.c4 * G)))
    dt = time.perf_counter() - t0
    verdict(
        "4",
        nonneg and closed <= 1e-12 and violations == 0 and dt < 20,
        f"H >= 0 on 1e6 samples={nonneg}, gamma=2 closed-form error {closed:.2e}, "
        f"{violations} bound violations on a disjoint sample ({'; '.join(fitted)}), {dt:.1f}s",
    )


def test_criterion_5_layer_scalings(verdict):
    t0 = time.perf_counter()
    preset = get_preset("channel2d")
    times = np.linspace(0.0, 0.2, 5)
    grids = [preset.grid_for(e, 1.0, 8) for e in EPS]
    table = verify_layer_scalings(grids, lambda gr: steady_shear_trajectory(gr, times, SolverConfig(GAMMA)), 1.0, EPS)
    dt = time.perf_counter() - t0
    keys = ("blLp", "gradbl", "stimabella", "boundU", "ztilde")
    devs = {k: table.slopes[k] - SCALING_TARGETS[k][1](2.0) for k in keys}
    ok = all(abs(d) <= 0.05 for d in devs.values())
    verdict("5", ok and dt < 30, ", ".join(f"{k} slope {table.slopes[k]:+.4f}" for k in keys) + f", {dt:.2f}s")


def test_criterion_6_luca(verdict, sweep):
    rep, _ = sweep
    ells = luca_exponents(GAMMA, 0.5)
    checks = [(r.eps, *c) for r in rep.ok_rows for c in r.luca]
    bad = [c for c in checks if not c[-1]]
    complete = len(rep.ok_rows) == len(EPS) and len(checks) == len(EPS) * len(ells)
    worst = max(lhs / rhs for _, _, lhs, rhs, _ in checks if rhs > 0)
    verdict("6", complete and not bad, f"{len(bad)} violations over {len(checks)} checks, max lhs/rhs {worst:.6f}")


def test_criterion_7i_well_prepared_slope(verdict, sweep):
    rep, dt = sweep
    target = (GAMMA - 1.0) / GAMMA
    slope = rep.fits["wp_kinetic"].slope
    vals = ", ".join(f"{v:.3e}" for v in rep.column("wp_kinetic"))
    verdict("7(i)", abs(slope - target) <= 0.1 and dt < 600, f"slope {slope:.4f}, target {target:.4f} +- 0.1 (values {vals})")


def test_criterion_7ii_convergence_to_euler(verdict, sweep):
    rep, dt = sweep
    parts, ok = [], True
    for name in ("sup_relE", "tesi"):
        vals = rep.column(name)
        dec = bool(np.all(np.diff(vals) < 0))
        s = rep.fits[name].slope
        ok = ok and dec and s > 0
        parts.append(f"{name} strictly decreasing={dec} order {s:.3f}")
    verdict("7(ii)", ok and dt < 600, "; ".join(parts) + f"; sweep {dt:.0f}s")


def test_criterion_7iii_thm1_decreases(verdict, sweep):
    rep, dt = sweep
    vals = rep.column("K_thm1")
    dec = bool(np.all(np.diff(vals) < 0))
    verdict("7(iii)", dec and dt < 600, "K_thm1 " + ", ".join(f"{v:.6f}" for v in vals))


def _random_fields(n, seed):
    rng = np.random.default_rng(seed)
    g = Grid.slab(n)
    x = g.centers[0]
    times = np.linspace(0.0, 0.2, 9)
    a, b = rng.uniform(-1, 1, (2, 5))
    rho = np.array([1 + 0.1 * sum(a[k] * np.cos((k + 1) * np.pi * x + t) for k in range(5)) for t in times])
    u = np.array([0.2 * np.sin(np.pi * x) * sum(b[k] * np.cos(k * np.pi * x - t) for k in range(5)) for t in times])
    return g, times, rho, (rho * u)[:, None]


def test_criterion_8_remainder_sanity(verdict):
    t0 = time.perf_counter()
    g2 = GasLaw(GAMMA)
    law = make_law("linear", 0.5, GAMMA)
    coarse = Grid.slab(256)
    euler = euler_solve(bump1d(coarse.refine(4)), g2, SolverConfig(GAMMA), 0.2, output_times(0.2, 20))
    ref = euler.restrict(coarse)
    same = Trajectory(coarse, ref.times, ref.rho, ref.m, SolverConfig(GAMMA), kind="ns")
    rem = remainder_terms(same, null_layer(coarse, ref), law, g2)
    worst = max(float(np.max(np.abs(rem.rates[f"R{i}"]))) for i in range(1, 8))

    g, times, rho, m = _random_fields(512, 11)
    _, _, rhoE, mE = _random_fields(512, 12)
    cfg = SolverConfig(GAMMA, eps=2 ** -4, r1=2 ** -4)
    lay = build_layer(g, Trajectory(g, times, rhoE, mE, cfg.inviscid(), kind="euler"), 1.0, 2 ** -4)
    rr = remainder_terms(Trajectory(g, times, rho, m, cfg, kind="ns"), lay, law, g2)
    divE = np.gradient(mE[:, 0] / rhoE, g.spacing[0], axis=1, edge_order=2)
    H = (rho - rhoE) ** 2          # H(rho | rho^E) in closed form at gamma = 2
    magnitude = time_integral((GAMMA - 1.0) * np.sum(divE * H, axis=1) * g.cell_volume, times)
    rel = abs(abs(rr.totals["R2"]) - abs(magnitude)) / abs(magnitude)
    signed = rr.totals["R2"] == pytest.approx(-magnitude, rel=1e-8)
    dt = time.perf_counter() - t0
    verdict(
        "8",
        worst < 1e-10 and rel <= 1e-8 and signed and dt < 10,
        f"max |R1..R7| on the Euler reference {worst:.2e}; R2 vs (gamma-1) int int div u^E H: "
        f"rel. difference {rel:.2e} (R2 = {rr.totals['R2']:.6e}, identity {magnitude:.6e}, opposite sign), {dt:.2f}s",
    )


def test_criterion_9_gronwall(verdict, sweep):
    rep, _ = sweep
    parts, ok = [], len(rep.ok_rows) == len(EPS)
    for r in rep.ok_rows:
        good = np.isfinite(r.gronwall_C) and np.isfinite(r.gronwall_residual) and r.gronwall_holds
        ok = ok and good
        parts.append(f"eps={r.eps:.4g}: C={r.gronwall_C:.3f} res={r.gronwall_residual:.2e} holds={r.gronwall_holds}")
    verdict("9", ok, "; ".join(parts))
