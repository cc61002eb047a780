import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import relative_entropy_loop
from vvlab.errors import DomainError, ParameterError
from vvlab.thermo import (
    GasLaw,
    entropy_H,
    entropy_H_prime,
    fit_equivalence_constants,
    norm_ratios,
    pressure,
    pressure_prime,
    reference_gauge,
    relative_entropy,
)


def test_pressure_and_entropy_examples(gas2):
    assert pressure(gas2, 3.0) == 9.0
    assert pressure_prime(gas2, 3.0) == 6.0
    assert entropy_H(gas2, 3.0) == 9.0
    assert relative_entropy(gas2, 3.0, 1.0) == 4.0
    assert relative_entropy(GasLaw(1.4), 2.0, 2.0) == 0.0


def test_invalid_gamma_and_reference():
    with pytest.raises(ParameterError):
        GasLaw(1.0)
    with pytest.raises(DomainError):
        relative_entropy(GasLaw(2.0), 1.0, 0.0)


@given(st.floats(1.05, 4.0), st.floats(1e-3, 10.0))
def test_entropy_generates_pressure(gamma, rho):
    g = GasLaw(gamma)
    assert entropy_H_prime(g, rho) * rho - entropy_H(g, rho) == pytest.approx(pressure(g, rho), rel=1e-12)


@given(st.floats(1.05, 4.0), st.floats(0.5, 2.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 1.0))
def test_relative_entropy_convex(gamma, r, a, b, t):
    g = GasLaw(gamma)
    mid = relative_entropy(g, t * a + (1 - t) * b, r)
    chord = t * relative_entropy(g, a, r) + (1 - t) * relative_entropy(g, b, r)
    assert mid <= chord + 1e-12 * (1 + abs(chord))


def test_relative_entropy_matches_scalar_oracle(rng):
    rho = rng.uniform(0, 5, 200)
    r = rng.uniform(0.5, 2, 200)
    assert np.allclose(relative_entropy(GasLaw(1.4), rho, r), relative_entropy_loop(1.4, rho, r), rtol=1e-12, atol=1e-14)


def test_million_samples_non_negative_and_closed_form(rng):
    rho = rng.uniform(0.0, 10.0, 10 ** 6)
    r = rng.uniform(0.5, 2.0, 10 ** 6)
    for gamma in (1.4, 2.0, 3.0):
        h = relative_entropy(GasLaw(gamma), rho, r)
        # cancellation near rho = r leaves round-off of size eps_mach * H(r)
        assert np.all(h >= -1e-13)
    h2 = relative_entropy(GasLaw(2.0), rho, r)
    assert np.max(np.abs(h2 - (rho - r) ** 2)) <= 1e-12 * max(1.0, np.max((rho - r) ** 2))


def test_gauge_continuous_at_unit_gap(gas2):
    assert reference_gauge(GasLaw(1.4), 2.0, 1.0) == 1.0
    assert reference_gauge(gas2, 1.5, 1.0) == 0.25


def test_trivial_constants_gamma_two():
    c = fit_equivalence_constants(GasLaw(2.0), (1.0, 1.0), rho_cap=2.0, n_rho=2001, n_r=1, n_profiles=50)
    assert c.c3 <= 1.0 <= c.c4
    assert 0 < c.c3 <= c.c4


@pytest.mark.parametrize("gamma", [1.4, 4.0 / 3.0, 2.0, 3.0])
def test_fitted_constants_hold_on_disjoint_sample(gamma):
    g = GasLaw(gamma)
    c = fit_equivalence_constants(g, (0.5, 2.0), n_rho=2000, n_r=2000, n_profiles=200)
    assert 0 < c.c3 <= c.c4 and np.isfinite(c.c4)
    rng = np.random.default_rng(7)
    rho = rng.uniform(0.0, 2 * c.rho_cap, 200_000)
    r = rng.uniform(0.5, 2.0, 200_000)
    keep = np.abs(rho - r) > 1e-6
    rho, r = rho[keep], r[keep]
    h = relative_entropy(g, rho, r)
    G = reference_gauge(g, rho, r)
    assert np.all(h >= c.c3 * G) and np.all(h <= c.c4 * G)


def test_gamma_14_regression_fixture():
    c = fit_equivalence_constants(GasLaw(1.4), (0.5, 2.0), n_rho=2000, n_r=2000, n_profiles=200)
    assert c.c3 == pytest.approx(0.4226, rel=2e-3)
    assert c.c4 == pytest.approx(2.5025, rel=2e-3)


def test_norm_ratios_bounded_by_c5(rng):
    g = GasLaw(1.4)
    c = fit_equivalence_constants(g, (0.5, 2.0), n_rho=500, n_r=500, n_profiles=2000)
    assert c.c5 > 0 and c.omega_measure == 1.0
    for _ in range(100):
        r = rng.uniform(0.5, 2.0, 100)
        rho = np.maximum(r + 0.1 * rng.standard_normal(100), 0.0)
        a, b = norm_ratios(g, rho, r, 0.01)
        assert a <= c.c5 * 1.5 and b <= c.c5 * 1.5
    assert all(np.isnan(norm_ratios(g, r, r, 0.01)))


@pytest.mark.parametrize("K", [(0.0, 1.0), (2.0, 1.0), (1.0, np.inf)])
def test_bad_compact_set(K):
    with pytest.raises(ParameterError):
        fit_equivalence_constants(GasLaw(2.0), K)
