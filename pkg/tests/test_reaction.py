import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlkm import ModelParams, f_kinetics, g_kinetics, jacobian

P = ModelParams()
finite = dict(allow_nan=False, allow_infinity=False)


def test_f_values():
    assert f_kinetics(0.0, 7.3, P) == 0.0
    assert f_kinetics(2.0, 0.5, P) == pytest.approx(1.91, abs=1e-15)


def test_g_values():
    assert g_kinetics(4.0, 0.0, P) == P.a
    assert g_kinetics(2.0, 0.5, P) == pytest.approx(-2.35, abs=1e-15)
    assert g_kinetics(0.0, P.a, P) == 0.0


def test_jacobian_closed_forms():
    np.testing.assert_array_equal(jacobian(0.0, P.a, P), [[-P.alpha, 0.0], [0.0, -1.0]])
    np.testing.assert_allclose(jacobian(3.0, 0.015, P), [[0.045, 9.0], [-0.09, -10.0]],
                               rtol=0, atol=1e-15)


def test_quasi_positivity_grid():
    s = np.linspace(0, 10, 1000)
    assert np.all(f_kinetics(0.0, s, P) == 0.0)
    assert np.all(g_kinetics(s, 0.0, P) == P.a)


def test_jacobian_finite_differences(rng):
    h = 1e-6
    for n, w in rng.uniform(0, 5, (100, 2)):
        J = jacobian(n, w, P)
        fd = np.array([
            [(f_kinetics(n + h, w, P) - f_kinetics(n - h, w, P)) / (2 * h),
             (f_kinetics(n, w + h, P) - f_kinetics(n, w - h, P)) / (2 * h)],
            [(g_kinetics(n + h, w, P) - g_kinetics(n - h, w, P)) / (2 * h),
             (g_kinetics(n, w + h, P) - g_kinetics(n, w - h, P)) / (2 * h)],
        ])
        # relative to the entry, with an absolute floor for entries near zero
        assert np.all(np.abs(fd - J) <= 1e-6 * np.maximum(np.abs(J), 1.0))


@given(st.floats(0, 50, **finite), st.floats(0, 50, **finite))
def test_sum_cancels_exchange_term(n, w):
    total = f_kinetics(n, w, P) + g_kinetics(n, w, P)
    assert total == pytest.approx(P.a - w - P.alpha * n, abs=1e-12 * max(1.0, w * n * n))


@pytest.mark.parametrize("kwargs", [
    dict(d1=0.01, d2=0.01),
    dict(d1=0.0),
    dict(d2=0.0),
    dict(v=-1.0),
    dict(a=0.0),
    dict(alpha=-0.1),
    dict(mode="periodic"),
])
def test_params_rejected(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_local_mode_allows_zero_water_diffusion():
    assert ModelParams(mode="local", d2=0.0).d2 == 0.0
