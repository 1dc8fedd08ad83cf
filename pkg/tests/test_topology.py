from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grushin import RectilinearDomain, axis_components, incidence_graph, obstruction_check, side_components
from grushin.topology import NoObstruction, Obstruction


@pytest.mark.parametrize(
    "rects",
    [[(0, 0, 0, 1)], [(1, 0, 0, 1)], [(0, 1, 0, 1), (2, 3, 0, 1)], [(0, 1, 0, 1), (1, 2, 1, 2)]],
)
def test_invalid_domains(rects):
    with pytest.raises(ValueError):
        RectilinearDomain.from_rects(rects)


def test_decimal_strings_are_exact():
    d = RectilinearDomain.from_rects([("-0.1", "0.3", "0", "1")])
    assert d.rects[0][0] == Fraction(-1, 10)


def test_contains_open_union():
    d = RectilinearDomain.from_rects([(0, 1, 0, 1), (1, 2, 0, 1)])
    inside = d.contains(np.array([0.5, 1.0, 1.0, 0.0, 2.5]), np.array([0.5, 0.5, 1.0, 0.5, 0.5]))
    assert inside.tolist() == [True, True, False, False, False]


def test_omega_structure(omega, omega_prime):
    assert [tuple(map(int, c)) for c in axis_components(omega)] == [(-3, -2), (-1, 0), (1, 2)]
    assert len(axis_components(omega_prime)) == 3
    assert sorted(s.side for s in side_components(omega)) == ["left", "right", "right", "right"]
    assert sorted(incidence_graph(omega).side_degrees(), reverse=True) == [3, 1, 1, 1]
    assert sorted(incidence_graph(omega_prime).side_degrees(), reverse=True) == [2, 2, 1, 1]


def test_obstruction_found(omega, omega_prime):
    res = obstruction_check(omega, omega_prime)
    assert isinstance(res, Obstruction)
    assert res.certificate["kind"] == "side_degree_multiset"


def test_no_obstruction_with_itself(omega):
    res = obstruction_check(omega, omega)
    assert isinstance(res, NoObstruction)
    assert res.axis_map == {0: 0, 1: 1, 2: 2}


def test_mirror_needs_side_swap(omega):
    mirror = omega.affine_image(-1, 1)
    assert not obstruction_check(omega, mirror).obstructed
    assert obstruction_check(omega, mirror, allow_side_swap=False).obstructed


def test_boundary_along_axis_is_not_a_component():
    # the upper right square lies along x = 0 where the left side is absent
    d = RectilinearDomain.from_rects([(-1, 1, 0, 1), (0, 1, 1, 2)])
    g = incidence_graph(d)
    assert g.axis == ((0, 1),)
    assert sorted(g.side_degrees()) == [1, 1]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1, 2]), st.integers(1, 4), st.integers(-3, 3))
def test_obstruction_invariant_under_entire_maps(alpha, lam, shift):
    om = RectilinearDomain.from_rects([(-2, -1, -3, 2), (-2, 1, 1, 2), (-2, 1, -1, 0), (-2, 1, -3, -2)])
    image = om.dilate(lam, alpha).translate(shift)
    assert not obstruction_check(om, image).obstructed
    assert len(axis_components(image)) == 3
