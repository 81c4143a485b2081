import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from casimir_patch.core import (
    BowlGeometry,
    CartPoint,
    DiscGeometry,
    DomainError,
    SingularPointError,
    UnsupportedRegionError,
)
from casimir_patch.greens import DiscGreen, FreeSpaceGreen, free_space
from casimir_patch.kelvin import (
    KelvinSphere,
    bowl_green,
    disc_from_halfplane,
    disc_inversion_sphere,
    invert_point,
    transform_green,
)

from helpers import rel

vec = st.tuples(*[st.floats(-3, 3)] * 3)
radius = st.floats(0.1, 3.0)


@given(vec, radius, vec)
def test_inversion_is_an_involution(c, s, p):
    k = KelvinSphere(c, s)
    assume(np.linalg.norm(np.subtract(p, c)) > 1e-2)
    back = invert_point(k, invert_point(k, p))
    assert np.allclose(back, p, rtol=1e-10, atol=1e-10)


@given(vec, radius, st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_sphere_points_are_fixed(c, s, theta, phi):
    k = KelvinSphere(c, s)
    p = np.array(c) + s * np.array([math.sin(theta) * math.cos(phi),
                                     math.sin(theta) * math.sin(phi), math.cos(theta)])
    assert np.allclose(invert_point(k, p), p, atol=1e-12 * (1 + s))


def test_inversion_returns_cart_point_for_cart_point():
    out = invert_point(KelvinSphere((0, 0, 0), 2.0), CartPoint(1.0, 0.0, 0.0))
    assert out == CartPoint(4.0, 0.0, 0.0)


def test_centre_is_singular_and_radius_validated():
    with pytest.raises(SingularPointError):
        invert_point(KelvinSphere((1, 2, 3), 1.0), (1, 2, 3))
    with pytest.raises(DomainError):
        KelvinSphere((0, 0, 0), 0.0)


@given(vec, vec, vec, radius)
def test_free_space_is_invariant_under_inversion(a, b, c, s):
    assume(np.linalg.norm(np.subtract(a, b)) > 1e-2)
    assume(min(np.linalg.norm(np.subtract(a, c)), np.linalg.norm(np.subtract(b, c))) > 1e-2)
    g = transform_green(KelvinSphere(c, s), FreeSpaceGreen())
    assert rel(g.full(a, b), free_space(a, b)) < 1e-11
    assert abs(g.homogeneous(a, b)) < 1e-11 * free_space(a, b)


def test_disc_sphere_maps_halfplane_edge_to_rim():
    k = disc_inversion_sphere(1.0)
    # the edge x = y = 0 (STANDARD half-plane frame) lands on the rim circle
    for z in (-3.0, 0.0, 0.5, 10.0):
        x, y, zz = invert_point(k, (0.0, 0.0, z))
        assert y == 0.0
        assert math.hypot(x + 0.5, zz) == pytest.approx(0.5)


def test_composed_disc_covers_substrate():
    geom = DiscGeometry(1.0, 1.5)
    g = disc_from_halfplane(geom)
    src = (0.1, 0.2, 0.4)
    below = g.full((0.3, 0.1, -0.2), src)
    assert below > 0.0
    # continuous across the interface outside the disc
    assert g.full((0.9, 0.0, 1e-9), src) == pytest.approx(g.full((0.9, 0.0, -1e-9), src), rel=1e-7)


def _on_bowl(theta, phi, d=1.0):
    return 0.5 * d * np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                               -abs(math.cos(theta))])


@given(st.floats(0, math.pi / 2 - 0.01), st.floats(0, 2 * math.pi), vec)
def test_bowl_vanishes_on_bowl(theta, phi, src):
    src = np.array(src)
    geom = BowlGeometry(1.0)
    g = bowl_green(geom)
    r = _on_bowl(theta, phi)
    assume(abs(src @ src - 0.25) > 1e-2 and np.linalg.norm(src - r) > 1e-2)
    if not g.valid(r, src):
        r = r * (1 + math.copysign(1e-15, src @ src - 0.25))
    assert abs(g.full(r, src)) <= 1e-10 * free_space(r, src)


def test_bowl_needs_same_side_of_sphere():
    g = bowl_green(BowlGeometry(1.0))
    with pytest.raises(UnsupportedRegionError):
        g.full((0, 0, 0.1), (0, 0, 2.0))
    assert g.full((0.1, 0, 0.1), (0, 0.1, -0.2)) > 0
    assert g.full((1.0, 0, 1.0), (0, 0.5, 2.0)) > 0


def test_bowl_rejects_substrate():
    with pytest.raises(UnsupportedRegionError):
        bowl_green(BowlGeometry(1.0), n=1.5)


def test_bowl_far_field_tends_to_free_space():
    g = bowl_green(BowlGeometry(1.0))
    a, b = np.array([0, 0, 1e3]), np.array([1.0, 0, 1e3])
    assert g.full(a, b) == pytest.approx(free_space(a, b), rel=1e-5)


def test_bare_disc_evaluator_covers_both_sides():
    from casimir_patch.kelvin import BareDiscGreen
    geom = DiscGeometry(1.0, 1.0)
    g = BareDiscGreen(geom)
    above, below, src = (0.3, 0.1, 0.2), (0.7, -0.2, -0.3), (0.1, 0.4, 0.5)
    assert g.full(above, src) == DiscGreen(geom).full(above, src)
    assert g.full(below, src) == pytest.approx(disc_from_halfplane(geom).full(below, src), rel=1e-14)
    assert g.full(below, src) == pytest.approx(g.full(src, below), rel=1e-10)
    with pytest.raises(UnsupportedRegionError):
        BareDiscGreen(DiscGeometry(1.0, 1.5))
