import numpy as np
import pytest

from grushin.quadrature import adaptive, gk15, ladder


@pytest.mark.parametrize("deg", [0, 5, 11, 22])
def test_gk15_exact_on_polynomials(deg):
    k, _ = gk15(lambda t: (t**deg)[None], np.array([0.0]), np.array([1.0]))
    assert k[0, 0] == pytest.approx(1.0 / (deg + 1), rel=1e-14)


def test_adaptive_vector_components():
    v, e = adaptive(lambda t: np.stack([np.sin(t), np.exp(t)]), [0.0, 1.0, np.pi])
    np.testing.assert_allclose(v, [2.0, np.exp(np.pi) - 1.0], rtol=1e-13)
    assert np.all(e < 1e-10)


def test_adaptive_handles_endpoint_sqrt():
    v, _ = adaptive(lambda t: np.sqrt(t)[None], [0.0, 1.0], rtol=1e-10)
    assert v[0] == pytest.approx(2.0 / 3.0, rel=1e-9)


def _ladder(power, c=0.0, r=1.0):
    floor = 1e-9

    def f(t, scale=1.0):
        return (np.maximum(np.abs(t - c), scale * floor) ** -power)[None]

    return ladder(f, c, r, lambda t: abs(t - c) <= floor, f)


@pytest.mark.parametrize("power,expected", [(0.5, 2.0), (0.25, 4.0 / 3.0)])
def test_ladder_integrable_singularity(power, expected):
    res = _ladder(power)
    assert not res.divergent[0]
    assert res.value[0] == pytest.approx(expected, rel=1e-6)
    assert abs(res.value[0] - expected) <= res.error[0]


@pytest.mark.parametrize("power", [1.0, 2.0])
def test_ladder_flags_divergence(power):
    res = _ladder(power)
    assert res.divergent[0]
    assert np.isinf(res.value[0])
    assert res.detected_at[0] == 3


def test_ladder_from_the_right_endpoint():
    res = _ladder(0.5, c=1.0, r=0.0)
    assert res.value[0] == pytest.approx(2.0, rel=1e-6)
