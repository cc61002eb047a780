import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import oversampled_integral
from vvlab.diagnostics import (
    CRITERIA,
    convergence_metric,
    criterion,
    criterion_density,
    diagnose,
    gronwall_fit,
    layer_region,
    luca_check,
    luca_exponents,
    parse_report,
    relative_energy,
    remainder_terms,
    s_mu,
    thm2_exponent,
)
from vvlab.errors import ConfigurationError, DomainError, ParameterError, PreconditionError
from vvlab.harness.presets import bump1d
from vvlab.layer import build_layer, null_layer
from vvlab.solver import FluidState, Grid, SolverConfig, Trajectory, euler_solve, ns_solve, output_times
from vvlab.thermo import GasLaw, relative_entropy
from vvlab.viscosity import make_law

G2 = GasLaw(2.0)
LAW = make_law("linear", 0.5, 2.0)


def constant_traj(grid, rho, u, times, cfg):
    s = FluidState.from_primitive(grid, rho, u)
    nt = len(times)
    return Trajectory(grid, np.asarray(times, dtype=float), np.stack([s.rho] * nt), np.stack([s.m] * nt), cfg, kind="ns")


def smooth_1d(n, seed=0, amp=0.1):
    """Random low-mode trajectory on [0, 1] with u vanishing at the walls."""
    rng = np.random.default_rng(seed)
    g = Grid.slab(n)
    x = g.centers[0]
    times = np.linspace(0.0, 0.2, 6)
    a, b = rng.uniform(-1, 1, (2, 4))
    rho, m = [], []
    for t in times:
        r = 1 + amp * sum(a[k] * np.cos((k + 1) * np.pi * x + t) for k in range(4))
        u = amp * np.sin(np.pi * x) * sum(b[k] * np.cos(k * np.pi * x - t) for k in range(4))
        rho.append(r)
        m.append((r * u)[None])
    return g, times, np.array(rho), np.array(m)


# --- S_mu ----------------------------------------------------------------


def test_s_mu_uniform_density_linear_velocity():
    g = Grid.slab(32)
    st_ = FluidState.from_primitive(g, 4 * np.ones(32), g.centers[0])
    for route in ("defT", "closed"):
        S = s_mu(st_, LAW, g, route)
        assert np.allclose(S[0, 0, 1:-1], 2.0, rtol=1e-12)


@pytest.mark.parametrize("grid", [Grid.slab(16), Grid.channel(4, 16)])
def test_s_mu_rest_and_vacuum(grid):
    st_ = FluidState.from_primitive(grid, np.ones(grid.shape), np.zeros((grid.dim,) + grid.shape))
    assert np.all(s_mu(st_, LAW, grid) == 0) and np.all(s_mu(st_, LAW, grid, "closed") == 0)
    rho = np.ones(grid.shape)
    rho.flat[3] = 1e-12
    with pytest.raises(PreconditionError):
        s_mu(FluidState(grid, rho, np.zeros((grid.dim,) + grid.shape)), LAW, grid)
    with pytest.raises(ParameterError):
        s_mu(st_, LAW, grid, route="other")


def test_s_mu_routes_agree_at_second_order():
    errs = []
    ns = (256, 512, 1024, 2048)
    law = make_law("power:1.5", 0.5, 2.0)
    for n in ns:
        st_ = bump1d(Grid.slab(n))
        a, b = s_mu(st_, law, st_.grid, "defT"), s_mu(st_, law, st_.grid, "closed")
        errs.append(np.sqrt(np.sum((a - b) ** 2) / np.sum(b ** 2)))
    assert -np.polyfit(np.log(ns), np.log(errs), 1)[0] >= 1.9
    assert errs[-1] < 1e-6


# --- relative energy -----------------------------------------------------


def test_relative_energy_examples(rng):
    g = Grid.slab(64)
    rho = 1 + 0.1 * rng.random(64)
    u = rng.random(64)
    st_ = FluidState.from_primitive(g, rho, u)
    assert relative_energy(st_, rho, u, G2) == pytest.approx(0.0, abs=1e-15)
    r = 1 + 0.1 * rng.random(64)
    expected = g.integrate(0.5 * rho * u ** 2 + (rho - r) ** 2)
    assert relative_energy(st_, r, np.zeros(64), G2) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(DomainError):
        relative_energy(st_, np.zeros(64), u, G2)


def test_relative_energy_matches_fine_quadrature():
    gam = 1.4
    rho_f = lambda x: 1 + 0.3 * np.sin(2 * np.pi * x) ** 2
    u_f = lambda x: np.cos(3 * x)
    r_f = lambda x: 1.1 + 0.2 * np.cos(np.pi * x)
    U_f = lambda x: x ** 2
    n = 16384
    g = Grid.slab(n)
    x = g.centers[0]
    st_ = FluidState.from_primitive(g, rho_f(x), u_f(x))
    val = relative_energy(st_, r_f(x), U_f(x), GasLaw(gam))
    H = lambda a, b: a ** gam / (gam - 1) - b ** gam / (gam - 1) - gam / (gam - 1) * b ** (gam - 1) * (a - b)
    oracle = oversampled_integral(lambda y: 0.5 * rho_f(y) * (u_f(y) - U_f(y)) ** 2 + H(rho_f(y), r_f(y)), 64, sub=4096)
    assert val == pytest.approx(oracle, rel=1e-8)


# --- layer region and criteria -------------------------------------------


def test_layer_region_geometry():
    g = Grid.slab(100)
    reg = layer_region(g, 1.0, 0.1)
    x = g.centers[0]
    assert np.array_equal(reg.mask, (x < 0.1) | (x > 0.9))
    assert reg.measure == pytest.approx(0.2, rel=1e-12)
    assert reg.measure <= reg.bound * (1 + 1e-12)
    g2 = Grid.slab(128)
    assert layer_region(g2, 1.0, 2 ** -4).measure == pytest.approx(2 * layer_region(g2, 1.0, 2 ** -5).measure)
    with pytest.raises(ConfigurationError):
        layer_region(Grid.slab(8), 1.0, 1e-3)


@given(st.integers(16, 400), st.floats(0.01, 0.4))
def test_layer_region_measure_bound(n, eps):
    g = Grid.slab(n)
    if eps <= 0.5 / n:
        return
    reg = layer_region(g, 1.0, eps)
    # a cell counts when its centre is inside, so each side overshoots by < h/2
    assert reg.measure < 2 * eps + g.spacing[0] + 1e-12
    aligned = Grid.slab(8 * n)
    e = 3.0 / n
    assert layer_region(aligned, 1.0, e).measure == pytest.approx(2 * e, rel=1e-12)


def test_thm1_rest_state_closed_form():
    g = Grid.slab(400)
    cfg = SolverConfig(2.0, eps=0.1)
    tr = constant_traj(g, np.ones(400), np.zeros(400), np.linspace(0, 1, 5), cfg)
    reg = layer_region(g, 1.0, 0.1)
    assert criterion("thm1", tr, reg, LAW, G2) == pytest.approx(2.0, rel=1e-12)
    for name in ("thm2", "cor", "byebye", "sueur"):
        assert criterion(name, tr, reg, LAW, G2) == 0.0
    assert criterion("bica", tr, reg, LAW, G2) == pytest.approx(2.0, rel=1e-12)
    assert criterion("bardos_nguyen", tr, reg, LAW, G2) == pytest.approx(0.2, rel=1e-12)
    with pytest.raises(ParameterError):
        criterion("nope", tr, reg, LAW, G2)


def test_thm2_exponent_example():
    assert thm2_exponent(2.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_criteria_non_negative_on_smooth_states():
    g, times, rho, m = smooth_1d(256)
    cfg = SolverConfig(2.0, eps=2 ** -4)
    tr = Trajectory(g, times, rho, m, cfg, kind="ns")
    reg = layer_region(g, 1.0, 2 ** -4)
    for name in CRITERIA:
        assert criterion(name, tr, reg, LAW, G2) >= 0.0
        assert np.all(criterion_density(name, tr.state(0), LAW, G2, 2 ** -4) >= 0)


# --- LUCA and Gronwall ---------------------------------------------------


def test_luca_equality_at_gamma_and_constant_density():
    g = Grid.slab(128)
    cfg = SolverConfig(2.0, eps=2 ** -4)
    tr = constant_traj(g, 1.7 * np.ones(128), np.zeros(128), np.linspace(0, 0.5, 6), cfg)
    reg = layer_region(g, 1.0, 2 ** -4)
    lhs, rhs = luca_check(tr, reg, G2, 2.0)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    # aligned grid: strip measure equals 2 c eps, so the bound is tight
    for ell in luca_exponents(2.0, 0.5):
        lhs, rhs = luca_check(tr, reg, G2, ell)
        assert lhs == pytest.approx(rhs, rel=1e-12)
    # unaligned grid: measure < 2 c eps makes it strict
    g3 = Grid.slab(100)
    tr3 = constant_traj(g3, 1.7 * np.ones(100), np.zeros(100), np.linspace(0, 0.5, 6), cfg)
    lhs, rhs = luca_check(tr3, layer_region(g3, 1.0, 0.055), G2, 1.0)
    assert lhs < rhs


def test_luca_vacuum_and_range():
    g = Grid.slab(64)
    cfg = SolverConfig(2.0, eps=0.1)
    tr = constant_traj(g, np.zeros(64), np.zeros(64), [0, 0.5, 1], cfg)
    reg = layer_region(g, 1.0, 0.1)
    assert luca_check(tr, reg, G2, 1.0) == (0.0, 0.0)
    for ell in (0.0, 2.5):
        with pytest.raises(ParameterError):
            luca_check(tr, reg, G2, ell)


# densities stay clear of subnormals, where rho**gamma underflows before rho**ell
@given(st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 10.0)), min_size=3, max_size=30), st.floats(0.1, 5.0))
def test_luca_holds_on_random_densities(values, T):
    g = Grid.slab(64)
    cfg = SolverConfig(2.0, eps=2 ** -3)
    n = len(values)
    rng = np.random.default_rng(len(values))
    rho = np.array(values)[:, None] * rng.random((n, 64))
    tr = Trajectory(g, np.linspace(0, T, n), rho, np.zeros((n, 1, 64)), cfg, kind="ns")
    reg = layer_region(g, 1.0, 2 ** -3)
    for ell in luca_exponents(2.0, 0.5):
        lhs, rhs = luca_check(tr, reg, G2, ell)
        assert lhs <= rhs * (1 + 1e-12) + 1e-300


def test_gronwall_examples():
    t = np.linspace(0, 1, 41)
    fit = gronwall_fit(t, 0.3 * np.exp(2 * t))
    assert fit.C == pytest.approx(2.0, abs=1e-6)
    assert fit.holds(t, 0.3 * np.exp(2 * t))
    assert gronwall_fit(t, np.full(41, 0.7)).C == pytest.approx(0.0, abs=1e-12)
    z = gronwall_fit(t, np.zeros(41))
    assert z.C == 0.0 and z.eta == 0.0
    with pytest.raises(PreconditionError):
        gronwall_fit(t, -np.ones(41))


@given(st.lists(st.floats(0.0, 1e3), min_size=2, max_size=40))
def test_gronwall_envelope_always_holds(values):
    t = np.linspace(0, 1, len(values))
    fit = gronwall_fit(t, values)
    assert np.isfinite(fit.C) and fit.holds(t, values)


# --- metric --------------------------------------------------------------


def test_convergence_metric_examples():
    g = Grid.slab(50)
    cfg = SolverConfig(2.0)
    times = [0.0, 0.1, 0.2]
    ref = constant_traj(g, np.ones(50), np.zeros(50), times, cfg)
    assert convergence_metric(ref, ref, G2) == 0.0
    shifted = constant_traj(g, 1.25 * np.ones(50), np.zeros(50), times, cfg)
    assert convergence_metric(shifted, ref, G2) == pytest.approx(0.25, rel=1e-13)


def test_convergence_metric_restricts_fine_reference():
    fine, coarse = Grid.slab(256), Grid.slab(64)
    times = [0.0, 0.1]
    cfg = SolverConfig(2.0)
    x = fine.centers[0]
    ref = constant_traj(fine, 1 + 0.1 * np.sin(np.pi * x), np.zeros(256), times, cfg)
    same = ref.restrict(coarse)
    assert convergence_metric(same, ref, G2) == pytest.approx(0.0, abs=1e-15)


# --- remainders ----------------------------------------------------------


def test_remainders_vanish_on_euler_reference():
    g = Grid.slab(128)
    euler = euler_solve(bump1d(g), G2, SolverConfig(2.0), 0.1, output_times(0.1, 10))
    tr = Trajectory(g, euler.times, euler.rho, euler.m, SolverConfig(2.0), kind="ns")
    rem = remainder_terms(tr, null_layer(g, euler), LAW, G2)
    for name in ("R1", "R2", "R3", "R4", "R5", "R6", "R7"):
        assert np.max(np.abs(rem.rates[name])) < 1e-10, name


def test_r2_identity_and_r6_split_on_random_fields():
    g, times, rho, m = smooth_1d(512, seed=3)
    _, _, rhoE, mE = smooth_1d(512, seed=4)
    cfg = SolverConfig(2.0, eps=2 ** -4, r1=0.1)
    tr = Trajectory(g, times, rho, m, cfg, kind="ns")
    euler = Trajectory(g, times, rhoE, mE, cfg.inviscid(), kind="euler")
    lay = build_layer(g, euler, 1.0, 2 ** -4)
    rem = remainder_terms(tr, lay, LAW, G2)
    divE = np.array([np.gradient(mE[k, 0] / rhoE[k], g.spacing[0], edge_order=2) for k in range(times.size)])
    H = relative_entropy(G2, rho, rhoE)
    oracle = -(G2.gamma - 1.0) * np.sum(divE * H, axis=1) * g.cell_volume
    assert np.allclose(rem.rates["R2"], oracle, rtol=1e-8, atol=0)
    split = rem.rates["R6a"] + rem.rates["R6b"] + rem.rates["R6c"] + rem.rates["R6d"]
    assert np.allclose(rem.rates["R6"], split, rtol=1e-10, atol=1e-14)
    assert np.allclose(rem.rates["R7"], rem.rates["R7_tilde"] + rem.rates["R7_hat"], rtol=1e-10, atol=1e-14)
    assert np.all(np.abs(rem.rates["R7_tilde"]) <= 2.01 * rem.rates["R7_tilde_abs"] + 1e-14)


def test_r6c_split_is_exact_for_the_product_rule_gradient():
    # grad v is assembled as z grad u^E + u^E (x) grad z, so the split holds to round-off
    gaps = []
    for n in (256, 1024):
        g, times, rho, m = smooth_1d(n, seed=5)
        _, _, rhoE, mE = smooth_1d(n, seed=6)
        cfg = SolverConfig(2.0, eps=2 ** -3)
        lay = build_layer(g, Trajectory(g, times, rhoE, mE, cfg.inviscid(), kind="euler"), 1.0, 2 ** -3)
        rem = remainder_terms(Trajectory(g, times, rho, m, cfg, kind="ns"), lay, LAW, G2)
        scale = np.max(np.abs(rem.rates["R6c"]))
        assert scale > 0
        gaps.append(np.max(np.abs(rem.rates["R6c"] - rem.rates["R6_tilde"] - rem.rates["R6_hat"])) / scale)
    assert max(gaps) < 1e-12


def test_remainder_preconditions():
    g = Grid.slab(64)
    euler = euler_solve(bump1d(g), G2, SolverConfig(2.0), 0.05, [0.0, 0.05])
    with pytest.raises(PreconditionError):
        remainder_terms(euler, null_layer(g, euler), LAW, G2)


# --- report --------------------------------------------------------------


@pytest.fixture(scope="module")
def small_report():
    g = Grid.slab(256)
    cfg = SolverConfig(2.0, eps=2 ** -4, r1=2 ** -4)
    times = output_times(0.05, 10)
    euler = euler_solve(bump1d(g.refine(4)), G2, SolverConfig(2.0), 0.05, times)
    lay = build_layer(g, euler.restrict(g), 1.0, 2 ** -4)
    init = FluidState.from_primitive(g, lay.rho_E[0], lay.U[0])
    tr = ns_solve(init, LAW, G2, cfg, 0.05, times)
    return diagnose(tr, euler, LAW, G2)


def test_report_invariants(small_report):
    rep = small_report
    assert np.all(rep.series["relE_U"] >= 0) and np.all(rep.series["relE_uE"] >= 0)
    assert rep.series["relE_U"][0] == pytest.approx(0.0, abs=1e-15)
    assert all(v >= 0 for v in rep.criteria.values())
    assert rep.relE_bound_ok
    assert all(ok for *_, ok in rep.luca)
    assert rep.gronwall.holds(rep.times, rep.series["relE_U"])


def test_report_text_round_trip(small_report, tmp_path):
    rep = small_report
    path = rep.write(tmp_path / "d.txt")
    meta, series, summary = parse_report(path.read_text())
    assert meta["eps"] == rep.meta["eps"] and meta["law"] == "linear"
    for k, v in rep.series.items():
        assert np.array_equal(series[k], v), k
    for k, v in rep.summary().items():
        assert summary[k] == pytest.approx(v, rel=1e-15) if isinstance(v, float) else summary[k] == v
    with pytest.raises(ConfigurationError):
        parse_report("stray line\n")
