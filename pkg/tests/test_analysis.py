import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlkm import (
    KernelSpec,
    ModelParams,
    build_kernel,
    coefficient_of_variation,
    comparison_oracle,
    dominant_wavelength,
    equilibria,
    f_kinetics,
    g_kinetics,
    lemma21_identity_residuals,
    make_grid,
    turing_report,
)
from nlkm.analysis import radial_power_spectrum

P = ModelParams()


@pytest.fixture(scope="module")
def k16():
    return build_kernel(make_grid(8, 8, 16, 16), KernelSpec(1.0))


@pytest.fixture(scope="module")
def k16_unit():
    return build_kernel(make_grid(16, 16, 16, 16), KernelSpec(1.0))


def test_standard_equilibria():
    eq = equilibria(P)
    assert eq.bare_soil == (0.0, 0.15)
    assert eq.discriminant == pytest.approx(0.0144, abs=1e-17)
    (n1, w1), (n2, w2) = eq.vegetated
    assert n1 == pytest.approx(1 / 3, abs=1e-14) and w1 == pytest.approx(0.135, abs=1e-15)
    assert n2 == pytest.approx(3.0, abs=1e-13) and w2 == pytest.approx(0.015, abs=1e-15)
    assert eq.all == (eq.bare_soil, eq.vegetated[0], eq.vegetated[1])


def test_degenerate_and_empty_sets():
    eq = equilibria(ModelParams(a=0.09, alpha=0.045))
    assert eq.vegetated == ((1.0, 0.045),)
    eq = equilibria(ModelParams(a=0.08, alpha=0.045))
    assert eq.vegetated == () and eq.bare_soil == (0.0, 0.08)


def test_random_equilibria_residuals(rng):
    for _ in range(1000):
        alpha = rng.uniform(1e-3, 2.0)
        a = 2 * alpha * rng.uniform(1.0 + 1e-9, 20.0)
        p = ModelParams(a=a, alpha=alpha)
        eq = equilibria(p)
        assert len(eq.vegetated) == 2
        assert eq.vegetated[0][0] < eq.vegetated[1][0]
        for n, w in eq.all:
            assert abs(f_kinetics(n, w, p)) + abs(g_kinetics(n, w, p)) <= 1e-12 * max(1.0, a)
        for n, w in eq.vegetated:
            assert w * n == pytest.approx(alpha, rel=1e-12)


def test_turing_report_vegetated_state():
    rep = turing_report(P, (3.0, 0.015))
    np.testing.assert_allclose(rep.jacobian, [[0.045, 9.0], [-0.09, -10.0]], atol=1e-15)
    assert rep.trace == pytest.approx(-9.955, abs=1e-12)
    assert rep.det == pytest.approx(0.36, abs=1e-12)
    J = rep.jacobian
    assert abs(rep.trace - (J[0, 0] + J[1, 1])) <= 1e-14
    assert abs(rep.det - (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])) <= 1e-14
    # standard third condition: 0.003 * 0.045 + 0.05 * (-10) = -0.499865
    # its square 0.24987 still exceeds 4 d1 d2 det = 2.16e-4
    assert rep.standard_conditions == (True, True, False, True)
    # printed set: f_w + g_n = 8.91, so the first printed condition fails
    assert rep.printed_conditions[0] is False
    assert rep.verdict == "stable_no_pattern"
    assert any("d1 > d2" in note for note in rep.notes)


def test_turing_report_bare_soil():
    rep = turing_report(P, (0.0, 0.15))
    np.testing.assert_array_equal(rep.jacobian, [[-0.045, 0.0], [0.0, -1.0]])
    assert rep.verdict == "stable_no_pattern"
    assert not all(rep.standard_conditions) and not all(rep.printed_conditions)


def test_turing_report_saddle_is_unstable():
    eq = equilibria(P)
    rep = turing_report(P, eq.vegetated[0])
    assert rep.det < 0
    assert rep.verdict == "hopf_or_unstable"


def test_turing_report_rejects_non_equilibrium():
    with pytest.raises(ValueError):
        turing_report(P, (1.0, 1.0))


def test_symmetry_identity_trivial_cases(k16, rng):
    g = k16.grid
    w = rng.standard_normal(g.shape)
    r1, r2 = lemma21_identity_residuals(k16, np.full(g.shape, 2.5), w)
    assert r1 <= 1e-12 * 2.5 * np.abs(w).max() * g.area ** 2
    assert r2 == 0.0
    r1, r2 = lemma21_identity_residuals(k16, rng.uniform(0, 1, g.shape), w)
    assert r2 == 0.0


def test_symmetry_identity_random_pairs(k16, rng):
    g = k16.grid
    for _ in range(20):
        v = rng.uniform(-1, 1, g.shape)
        w = rng.uniform(-1, 1, g.shape)
        r1, r2 = lemma21_identity_residuals(k16, v, w)
        assert r1 <= 1e-12 * np.abs(v).max() * np.abs(w).max() * g.area ** 2
        assert r2 >= -1e-12


def test_symmetry_identity_residual_does_not_grow_with_refinement(rng):
    rel = []
    for n in (8, 16, 32):
        k = build_kernel(make_grid(8, 8, n, n), KernelSpec(1.0))
        v = rng.uniform(-1, 1, k.grid.shape)
        w = rng.uniform(-1, 1, k.grid.shape)
        r1, _ = lemma21_identity_residuals(k, v, w)
        rel.append(r1 / (np.abs(v).max() * np.abs(w).max() * k.grid.area ** 2))
    assert max(rel) <= 1e-13


def test_symmetry_identity_grid_mismatch(k16):
    with pytest.raises(ValueError):
        lemma21_identity_residuals(k16, np.zeros((8, 8)), np.zeros((16, 16)))


def test_comparison_zero_gap_is_identical(k16_unit, rng):
    z0 = rng.uniform(0, 1, k16_unit.grid.shape)
    res = comparison_oracle(k16_unit, lambda z: -z, z0, 0.0, 0.01, 1.0)
    assert res and res.min_gap == 0.0 and res.steps == 100


def test_comparison_linear_decay_family(k16_unit, rng):
    for _ in range(5):
        z0 = rng.uniform(0, 1, k16_unit.grid.shape)
        gap = rng.uniform(0, 0.2, k16_unit.grid.shape)
        assert comparison_oracle(k16_unit, lambda z: -z, z0, gap, 0.01, 1.0)


def test_comparison_quadratic_family(k16_unit, rng):
    for _ in range(5):
        z0 = rng.uniform(0, 0.1, k16_unit.grid.shape)
        assert comparison_oracle(k16_unit, lambda z: z * z, z0, 0.05, 0.01, 1.0)


def test_comparison_reports_first_violation(k16_unit, rng):
    # A "subsolution" forced upward is not one: the oracle must say so.
    z0 = rng.uniform(0, 1, k16_unit.grid.shape)
    res = comparison_oracle(k16_unit, lambda z: -z, z0, 0.0, 0.01, 1.0)
    assert res
    with pytest.raises(ValueError):
        comparison_oracle(k16_unit, lambda z: -z, z0, -0.1, 0.01, 1.0)
    # swap roles by giving the solution an extra sink through F
    res = comparison_oracle(k16_unit, lambda z: -z, z0, 1e-3, 0.01, 1.0, tol=-1e-9)
    assert res  # gap keeps zeta strictly below
    bad = comparison_oracle(k16_unit, lambda z: -z, z0, 0.0, 0.01, 1.0, tol=-1e-9)
    assert not bad and bad.first_violation[1] == 1


def test_cv_and_wavelength_of_a_plane_wave():
    g = make_grid(20, 20, 100, 100)
    X, _ = g.mesh()
    z = 2.0 + np.cos(2 * np.pi * X / 5.0)
    assert dominant_wavelength(z, g) == pytest.approx(5.0)
    assert coefficient_of_variation(z) == pytest.approx(np.std(z) / 2.0)
    assert math.isinf(dominant_wavelength(np.ones(g.shape), g))
    assert coefficient_of_variation(np.ones(g.shape)) == 0.0


def test_power_spectrum_drops_zero_mode():
    g = make_grid(10, 10, 20, 20)
    k, power = radial_power_spectrum(np.random.default_rng(1).random(g.shape), g)
    assert k[0] > 0 and np.all(power >= 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(1.0 + 1e-6, 50.0))
def test_equilibria_product_law_property(alpha, ratio):
    p = ModelParams(a=2 * alpha * ratio, alpha=alpha)
    for n, w in equilibria(p).vegetated:
        assert abs(w * n - alpha) <= 1e-12 * max(1.0, alpha)
