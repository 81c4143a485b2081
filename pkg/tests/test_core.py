import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_patch.core import (
    AxisMap,
    Basis,
    BasisMismatchError,
    BowlGeometry,
    CartPoint,
    CylPoint,
    DipoleVariance,
    DiscGeometry,
    DomainError,
    HalfPlaneGeometry,
    ShiftBreakdown,
    as_vec,
    assemble_shift,
    cart_to_cyl,
    cyl_to_cart,
    energy_to_si,
)

coord = st.floats(-50, 50, allow_nan=False)


@given(coord, coord, coord, st.sampled_from(list(AxisMap)))
def test_cartesian_cylindrical_round_trip(x, y, z, convention):
    p = CartPoint(x, y, z)
    back = cyl_to_cart(cart_to_cyl(p, convention), convention)
    assert np.allclose(np.asarray(back), np.asarray(p), atol=1e-12 * (1 + abs(x) + abs(y) + abs(z)))


@given(st.floats(0, 10), st.floats(0, 2 * math.pi), coord)
def test_cylindrical_round_trip_keeps_phi_range(rho, phi, z):
    c = cart_to_cyl(cyl_to_cart(CylPoint(rho, phi, z)))
    assert 0.0 <= c.phi < 2 * math.pi
    assert c.rho == pytest.approx(rho, abs=1e-12 * (1 + rho))


def test_half_plane_axis_map_puts_edge_along_x():
    p = cyl_to_cart(CylPoint(2.0, math.pi / 2, 5.0), AxisMap.HALF_PLANE)
    assert p.x == 5.0
    assert p.y == pytest.approx(0.0, abs=1e-15)
    assert p.z == pytest.approx(2.0)


@pytest.mark.parametrize("bad", [
    lambda: CylPoint(-1.0, 0.0, 0.0),
    lambda: CylPoint(1.0, 7.0, 0.0),
    lambda: CartPoint(float("nan"), 0.0, 0.0),
    lambda: HalfPlaneGeometry(0.5),
    lambda: DiscGeometry(0.0, 1.5),
    lambda: DiscGeometry(1.0, 0.9),
    lambda: BowlGeometry(-1.0),
    lambda: DipoleVariance.cartesian(-1.0, 0.0, 0.0),
])
def test_invalid_inputs_raise_domain_error(bad):
    with pytest.raises(DomainError):
        bad()


def test_eps_is_n_squared():
    assert HalfPlaneGeometry(1.5).eps == pytest.approx(2.25)
    assert DiscGeometry(1.0, 2.0).eps == 4.0


def test_isotropic_splits_total_variance():
    mu = DipoleVariance.isotropic(3.0)
    assert mu.components == (1.0, 1.0, 1.0)
    assert mu.is_isotropic


def _breakdown(basis=Basis.CARTESIAN):
    return ShiftBreakdown(1.0, 2.0, 3.0, basis, prefactor=0.5, sign=-1)


def test_assemble_shift_weights_components():
    mu = DipoleVariance.cartesian(1.0, 10.0, 100.0)
    assert assemble_shift(_breakdown(), mu) == pytest.approx(-0.5 * (1 + 20 + 300))


def test_contributions_sum_to_total():
    mu = DipoleVariance.cartesian(0.3, 0.2, 0.9)
    brk = _breakdown()
    assert sum(brk.contributions(mu)) == pytest.approx(assemble_shift(brk, mu))


def test_zero_variance_gives_zero_shift():
    assert assemble_shift(_breakdown(), DipoleVariance.cartesian(0, 0, 0)) == 0.0


def test_anisotropic_basis_mismatch_rejected():
    with pytest.raises(BasisMismatchError):
        assemble_shift(_breakdown(Basis.CYLINDRICAL), DipoleVariance.cartesian(1, 2, 3))


def test_isotropic_variances_cross_bases():
    mu = DipoleVariance.cartesian(2.0, 2.0, 2.0)
    assert assemble_shift(_breakdown(Basis.CYLINDRICAL), mu) == pytest.approx(-0.5 * 12.0)


def test_with_variances_fills_delta_e():
    brk = _breakdown().with_variances(DipoleVariance.cartesian(1, 1, 1))
    assert brk.delta_e == pytest.approx(-3.0)
    assert brk.xi_trace == 6.0


def test_energy_to_si_frozen():
    # 1 C^2 m^2 at unit length: 1/epsilon_0
    assert energy_to_si(1.0, 1.0) == pytest.approx(1.0 / 8.8541878128e-12, rel=1e-9)
    assert energy_to_si(1.0, 1e-9) == pytest.approx(1e27 / 8.8541878128e-12, rel=1e-9)


def test_as_vec_rejects_wrong_shape():
    with pytest.raises(DomainError):
        as_vec([1.0, 2.0])
    assert as_vec(CartPoint(1, 2, 3)).tolist() == [1, 2, 3]
