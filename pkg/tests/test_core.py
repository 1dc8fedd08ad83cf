import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grushin import (
    HorizontalJet,
    d_alpha_matrix,
    dilation,
    finite_diff_jet,
    horizontal_gradient,
    horizontal_jacobian,
    meyerson,
    meyerson_inv,
    wirtinger,
    wirtinger_identity_residual,
)
from grushin.errors import EvaluationOutsideDomain, SingularPoint

alphas = st.floats(0.1, 4.0)
coords = st.floats(-50.0, 50.0, allow_nan=False)


def identity_jet(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    one, zero = np.ones_like(x), np.zeros_like(x)
    return HorizontalJet(x, y, one, zero, zero, one)


@given(alphas, coords, coords)
def test_meyerson_round_trip(alpha, x, y):
    u, v = meyerson(alpha, x, y)
    xb, yb = meyerson_inv(alpha, u, v)
    assert xb == pytest.approx(x, rel=1e-12, abs=1e-12)
    assert yb == y


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_meyerson_values(alpha):
    u, v = meyerson(alpha, np.array([-2.0, 0.0, 2.0]), np.array([1.0, 2.0, 3.0]))
    expected = 2.0 ** (alpha + 1) / (alpha + 1)
    np.testing.assert_allclose(u, [-expected, 0.0, expected], rtol=1e-15)
    np.testing.assert_array_equal(v, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_dilation_scales_coordinates(alpha):
    x, y = dilation(alpha, 2.0, 1.5, -1.0)
    assert x == 3.0
    assert y == pytest.approx(-(2.0 ** (alpha + 1)))


def test_dilation_rejects_nonpositive_factor():
    with pytest.raises(ValueError):
        dilation(1.0, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_alpha_must_be_positive(bad):
    with pytest.raises(ValueError):
        meyerson(bad, 1.0, 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_identity_is_conformal(alpha):
    x = np.array([-1.5, -0.2, 0.7, 3.0])
    jet = identity_jet(x, np.zeros_like(x))
    w, wbar = wirtinger(alpha, jet, x)
    np.testing.assert_allclose(wbar, 0.0, atol=1e-15)
    np.testing.assert_allclose(w, 2 * np.abs(x) ** alpha, rtol=1e-15)
    m = d_alpha_matrix(alpha, jet, x)
    np.testing.assert_allclose(m.det, 1.0, rtol=1e-14)
    np.testing.assert_allclose(m.rotation_defect(), 0.0, atol=1e-15)
    np.testing.assert_allclose(horizontal_jacobian(alpha, jet, x), np.abs(x) ** alpha)


def test_horizontal_gradient_weights_y_derivative():
    jet = HorizontalJet(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    (a, b), (c, d) = horizontal_gradient(2.0, jet, -2.0)
    assert (a, b, c, d) == (3.0, 16.0, 5.0, 24.0)


def test_d_alpha_raises_on_zero_set():
    jet = identity_jet(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    with pytest.raises(SingularPoint):
        d_alpha_matrix(1.0, jet, np.array([0.0, 1.0]))


@settings(max_examples=200)
@given(alphas, st.lists(st.floats(-5, 5), min_size=7, max_size=7))
def test_identity_residual_vanishes_on_arbitrary_jets(alpha, v):
    jet = HorizontalJet(*v[:6])
    w, wbar = wirtinger(alpha, jet, v[6])
    res = wirtinger_identity_residual(alpha, jet, v[6])
    assert abs(res) <= 1e-12 * (1 + abs(w) ** 2 + abs(wbar) ** 2)


def test_finite_diff_jet_on_polynomial_map():
    def f(x, y):
        return x**2 - y, x * y

    jet = finite_diff_jet(f, 1.5, -0.5, h=1e-4)
    np.testing.assert_allclose([jet.g1x, jet.g1y, jet.g2x, jet.g2y], [3.0, -1.0, -0.5, 1.5], atol=1e-8)


def test_finite_diff_jet_respects_domain():
    with pytest.raises(EvaluationOutsideDomain):
        finite_diff_jet(lambda x, y: (x, y), 0.0, 0.0, h=0.1, contains=lambda x, y: np.asarray(x) < 0.05)


def test_finite_diff_rejects_bad_step():
    with pytest.raises(ValueError):
        finite_diff_jet(lambda x, y: (x, y), 1.0, 1.0, h=0.0)
