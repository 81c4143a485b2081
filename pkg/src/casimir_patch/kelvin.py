"""Kelvin inversion of points and Green's functions.

The disc and bowl evaluators here are built by composing the half-plane
closed form with one or two inversions; they serve as independent oracles
for :func:`casimir_patch.greens.disc_closed` and as the only bowl Green's
function in the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BowlGeometry,
    CartPoint,
    DiscGeometry,
    DomainError,
    HalfPlaneGeometry,
    SingularPointError,
    UnsupportedRegionError,
    as_vec,
)
from .greens import DiscGreen, GreensEval, HalfPlaneGreen, Reframed, free_space


@dataclass(frozen=True)
class KelvinSphere:
    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DomainError(f"inversion radius must be > 0, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(c) for c in as_vec(self.center)))

    @property
    def s(self) -> np.ndarray:
        return np.array(self.center)


def _invert(k: KelvinSphere, r) -> tuple[np.ndarray, float]:
    v = as_vec(r) - k.s
    dist2 = float(v @ v)
    if dist2 == 0.0:
        raise SingularPointError("cannot invert the centre of the inversion sphere")
    return k.s + (k.radius ** 2 / dist2) * v, math.sqrt(dist2)


def invert_point(k: KelvinSphere, r):
    """Reflect ``r`` in the sphere: s + S^2 (r - s)/|r - s|^2.

    Returns a :class:`CartPoint` when given one, an array otherwise.
    """
    image, _ = _invert(k, r)
    if isinstance(r, CartPoint):
        return CartPoint.from_array(image)
    return image


class KelvinTransformed(GreensEval):
    """S^2/(|r-s||r'-s|) g(T[r], T[r']).

    The inversion maps |T r - T r'| to S^2 |r - r'|/(|r - s||r' - s|), so
    the free-space part transforms into itself and the homogeneous part
    carries the same prefactor.
    """

    def __init__(self, sphere: KelvinSphere, g: GreensEval):
        self.sphere = sphere
        self.g = g

    def _mapped(self, r, rp):
        a, ra = _invert(self.sphere, r)
        b, rb = _invert(self.sphere, rp)
        return a, b, self.sphere.radius ** 2 / (ra * rb)

    def full(self, r, rp) -> float:
        a, b, pref = self._mapped(r, rp)
        return pref * self.g.full(a, b)

    def homogeneous(self, r, rp) -> float:
        a, b, pref = self._mapped(r, rp)
        return pref * self.g.homogeneous(a, b)

    def valid(self, r, rp) -> bool:
        try:
            a, b, _ = self._mapped(r, rp)
        except SingularPointError:
            return False
        return self.g.valid(a, b)


def transform_green(k: KelvinSphere, g: GreensEval) -> GreensEval:
    return KelvinTransformed(k, g)


# disc frame (X, Y, Z) -> half-plane frame: x = Y - d/2, y = Z, z = X
_DISC_TO_HALFPLANE = np.array([[0.0, 1.0, 0.0],
                               [0.0, 0.0, 1.0],
                               [1.0, 0.0, 0.0]])


def disc_inversion_sphere(d: float) -> KelvinSphere:
    """Sphere in the half-plane frame that maps the conductor onto the disc."""
    return KelvinSphere((-d, 0.0, 0.0), d)


def disc_from_halfplane(geom: DiscGeometry) -> GreensEval:
    """Disc Green's function by inversion of the half-plane closed form.

    Unlike :func:`greens.disc_closed` this also covers observation points
    inside the substrate (z < 0), since the half-plane form does.
    """
    inverted = transform_green(disc_inversion_sphere(geom.d),
                               HalfPlaneGreen(HalfPlaneGeometry(geom.n)))
    return Reframed(inverted, _DISC_TO_HALFPLANE, (-0.5 * geom.d, 0.0, 0.0))


class BareDiscGreen(GreensEval):
    """Bare disc (n = 1) for any pair of points off the conductor.

    Same-side pairs use the closed form; pairs straddling the disc plane use
    the inverted half-plane, which has no such restriction.
    """

    def __init__(self, geom: DiscGeometry):
        if geom.n != 1.0:
            raise UnsupportedRegionError("only the bare disc is covered on both sides")
        self.closed = DiscGreen(geom)
        self.composed = disc_from_halfplane(geom)

    def _pick(self, r, rp):
        if self.closed.valid(r, rp):
            return self.closed, r, rp
        # the composed form wants the source above; G is symmetric
        if as_vec(rp)[2] < 0.0:
            r, rp = rp, r
        return self.composed, r, rp

    def full(self, r, rp) -> float:
        g, r, rp = self._pick(r, rp)
        return g.full(r, rp)

    def homogeneous(self, r, rp) -> float:
        g, r, rp = self._pick(r, rp)
        return g.homogeneous(r, rp)


def bowl_inversion_sphere(d: float) -> KelvinSphere:
    """Sphere in the frame of a bare disc of radius d (diameter 2d)."""
    return KelvinSphere((0.0, 0.0, d), d)


class BowlGreen(Reframed):
    """Green's function of the bowl x^2+y^2+z^2 = d^2/4, z <= 0.

    Built from a bare disc of diameter 2d inverted in the sphere of radius
    d centred at (0, 0, d), then shifted down by d/2.  The exterior of the
    full sphere maps to the half-space above the disc and the interior to
    the half-space below, so both points must lie on the same side of the
    sphere x^2+y^2+z^2 = d^2/4.
    """

    def __init__(self, geom: BowlGeometry):
        self.geom = geom
        disc = DiscGreen(DiscGeometry(2.0 * geom.d, 1.0))
        super().__init__(transform_green(bowl_inversion_sphere(geom.d), disc),
                         np.eye(3), (0.0, 0.0, 0.5 * geom.d))

    # points this close to the sphere (relative to d^2/4) count as on it
    SPHERE_RTOL = 1e-12

    def full(self, r, rp) -> float:
        r = self._place(r, rp)
        if r is None:
            return 0.0
        return super().full(r, rp)

    def homogeneous(self, r, rp) -> float:
        r_in = as_vec(r)
        r = self._place(r, rp)
        if r is None:
            return -free_space(r_in, rp)
        return super().homogeneous(r, rp)

    def _place(self, r, rp):
        """Return r ready for evaluation, or None when it lies on the bowl.

        A point on the sphere belongs to both sides.  On the bowl itself the
        function vanishes; on the open cap it is nudged off the sphere toward
        the source so rounding cannot put the pair on opposite sides.
        """
        if not self.valid(r, rp):
            raise UnsupportedRegionError(
                "bowl Green's function needs both points on the same side of "
                "the sphere containing the bowl")
        r = as_vec(r)
        q = 0.25 * self.geom.d ** 2
        a = float(r @ r) - q
        if abs(a) > self.SPHERE_RTOL * q:
            return r
        if r[2] <= 0.0:
            return None
        b = float(as_vec(rp) @ as_vec(rp)) - q
        return r * (1.0 + math.copysign(2.0 * self.SPHERE_RTOL, b))

    def valid(self, r, rp) -> bool:
        q = 0.25 * self.geom.d ** 2
        a = float(as_vec(r) @ as_vec(r)) - q
        b = float(as_vec(rp) @ as_vec(rp)) - q
        if abs(b) <= self.SPHERE_RTOL * q:
            return False
        if abs(a) <= self.SPHERE_RTOL * q:
            return True
        return (a > 0.0) == (b > 0.0)


def bowl_green(geom: BowlGeometry, n: float = 1.0) -> GreensEval:
    """Bowl Green's function; a substrate (n != 1) is not supported."""
    if n != 1.0:
        raise UnsupportedRegionError(
            "the bowl construction does not preserve dielectric continuity; only n = 1")
    return BowlGreen(geom)
