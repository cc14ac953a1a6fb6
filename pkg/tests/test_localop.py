import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlkm import advection_x, laplacian_neumann, linf_norm, make_grid


def test_laplacian_of_constant_is_zero():
    g = make_grid(3, 3, 12, 12)
    assert np.all(laplacian_neumann(np.full(g.shape, 4.2), g) == 0.0)


def test_laplacian_linear_profile_four_cells():
    # 1D hand computation, h = 1, z = x at centres 0.5, 1.5, 2.5, 3.5:
    #   i=0: ghost = z0, so (z1 - z0) / h^2 = 1
    #   i=1, 2: z_{i-1} - 2 z_i + z_{i+1} = 0
    #   i=3: ghost = z3, so (z2 - z3) / h^2 = -1
    g = make_grid(4, 3, 4, 3)
    z = np.tile(g.x, (3, 1))
    lap = laplacian_neumann(z, g)
    np.testing.assert_array_equal(lap, np.tile([1.0, 0.0, 0.0, -1.0], (3, 1)))


def test_laplacian_rejects_rectangular_cells():
    g = make_grid(4, 3, 4, 4)
    with pytest.raises(ValueError):
        laplacian_neumann(np.zeros(g.shape), g)


def test_laplacian_matches_explicit_mirror(rng):
    g = make_grid(2, 2, 7, 7)
    z = rng.standard_normal(g.shape)
    expected = np.zeros_like(z)
    for j in range(7):
        for i in range(7):
            e = z[j, min(i + 1, 6)]
            w = z[j, max(i - 1, 0)]
            nn = z[min(j + 1, 6), i]
            s = z[max(j - 1, 0), i]
            expected[j, i] = (e + w + nn + s - 4 * z[j, i]) / g.hx ** 2
    np.testing.assert_allclose(laplacian_neumann(z, g), expected, rtol=1e-13, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 30))
def test_laplacian_sums_to_zero(seed, n):
    g = make_grid(1.0, 1.0, n, n)
    z = np.random.default_rng(seed).uniform(-10, 10, g.shape)
    total = np.sum(laplacian_neumann(z, g)) * g.hx ** 2
    assert abs(total) <= 1e-12 * linf_norm(z) * g.size


def test_advection_constant_and_zero_speed(rng):
    g = make_grid(5, 5, 10, 10)
    assert np.all(advection_x(np.full(g.shape, 3.0), 5.0, g) == 0.0)
    assert np.all(advection_x(rng.standard_normal(g.shape), 0.0, g) == 0.0)


def test_advection_linear_field_exact():
    # h = 0.25 is a power of two, so differences of (i + 1/2) h are exact
    g = make_grid(2, 2, 8, 8)
    z = np.tile(g.x, (8, 1))
    out = advection_x(z, 5.0, g)
    np.testing.assert_array_equal(out[:, :-1], 5.0)
    np.testing.assert_array_equal(out[:, -1], 0.0)


def test_advection_upwind_direction(rng):
    g = make_grid(3, 3, 6, 6)
    z = rng.standard_normal(g.shape)
    out = advection_x(z, 2.0, g)
    np.testing.assert_allclose(out[:, :-1], 2.0 * (z[:, 1:] - z[:, :-1]) / g.hx, rtol=1e-14)


def test_advection_rejects_negative_speed():
    g = make_grid(3, 3, 6, 6)
    with pytest.raises(ValueError):
        advection_x(np.zeros(g.shape), -1.0, g)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_operators_linear(seed, a, b):
    g = make_grid(3, 3, 9, 9)
    r = np.random.default_rng(seed)
    z1, z2 = r.standard_normal(g.shape), r.standard_normal(g.shape)
    for op in (lambda z: laplacian_neumann(z, g), lambda z: advection_x(z, 1.5, g)):
        lhs = op(a * z1 + b * z2)
        rhs = a * op(z1) + b * op(z2)
        assert linf_norm(lhs - rhs) <= 1e-12 * max(1.0, linf_norm(lhs))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_diffusion_discrete_maximum_principle(seed):
    g = make_grid(2, 2, 16, 16)
    d2 = 0.003
    dt = g.hx ** 2 / (4 * d2)
    w = np.random.default_rng(seed).uniform(0, 5, g.shape)
    lo, hi = w.min(), w.max()
    for _ in range(20):
        w = w + dt * d2 * laplacian_neumann(w, g)
        assert w.min() >= lo - 1e-14 and w.max() <= hi + 1e-14
        lo, hi = w.min(), w.max()
