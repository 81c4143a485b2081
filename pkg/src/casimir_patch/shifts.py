"""Closed-form Xi blocks, the finite-difference energy-shift oracle and forces.

Cartesian frames used for closed forms and shift functions:

* half-plane: edge along x, surface normal along z, conductor on the
  y > 0 side of the plane z = 0 and bare substrate on y < 0
  (:attr:`AxisMap.HALF_PLANE`);
* disc: disc-centred, normal along z (:attr:`AxisMap.STANDARD`);
* bowl: centre of the sphere at the origin, bowl occupying z <= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    AxisMap,
    Basis,
    BowlGeometry,
    CartPoint,
    CylPoint,
    DipoleVariance,
    DiscGeometry,
    DivergenceError,
    DomainError,
    Geometry,
    HalfPlaneGeometry,
    ShiftBreakdown,
    SingularPointError,
    StepTooLargeError,
    as_vec,
    assemble_shift,
    cart_to_cyl,
)
from .greens import DiscGreen, GreensEval, HalfPlaneGreen, Reframed
from .kelvin import BareDiscGreen, bowl_green

PI = math.pi
# points closer than this (relative to the geometry scale) count as on a conductor
SURFACE_RTOL = 1e-9

# half-plane Cartesian frame -> STANDARD half-plane frame: (x, y, z) -> (y, z, x)
HALF_PLANE_FRAME = np.array([[0.0, 1.0, 0.0],
                             [0.0, 0.0, 1.0],
                             [1.0, 0.0, 0.0]])


def _finish(xi, basis, prefactor, sign, mu):
    out = ShiftBreakdown(float(xi[0]), float(xi[1]), float(xi[2]), basis, prefactor, sign)
    return out.with_variances(mu) if mu is not None else out


# --------------------------------------------------------------------------
# half-plane
# --------------------------------------------------------------------------

def halfplane_prefactor(geom: HalfPlaneGeometry) -> float:
    return 1.0 / (2.0 * PI ** 2 * (geom.eps + 1.0))


def xi_halfplane_cyl(geom: HalfPlaneGeometry, at: CylPoint,
                     mu: Optional[DipoleVariance] = None) -> ShiftBreakdown:
    """Xi_rho, Xi_phi, Xi_z of the half-plane (conductor at phi = 0)."""
    if at.phi <= 0.0 or at.phi >= PI:
        raise DivergenceError("divergence: point on the surface (phi = 0 or pi)")
    if not at.rho > 0.0:
        raise DivergenceError("divergence: point on the conductor edge")
    s, c = math.sin(at.phi), math.cos(at.phi)
    r3 = at.rho ** 3
    bracket = (geom.eps + 1.0) * PI - 2.0 * at.phi
    edge = c / (16.0 * r3 * s * s)
    tail = bracket / (32.0 * r3 * s ** 3)
    xi = (5.0 / (48.0 * r3) + edge + tail * (1.0 + s * s),
          -1.0 / (48.0 * r3) + 2.0 * edge + tail * (1.0 + c * c),
          1.0 / (24.0 * r3) + edge + tail)
    return _finish(xi, Basis.CYLINDRICAL, halfplane_prefactor(geom), -1, mu)


def _check_halfplane_cart(y: float, z: float) -> None:
    if z <= 0.0 or (y >= 0.0 and z <= SURFACE_RTOL * y):
        if y >= 0.0:
            raise DivergenceError("divergence: point on conductor")
        raise DomainError("half-plane shift needs z > 0 (atom above the surface)")


def _halfplane_cart_terms(n: float, y: float, z: float, arctan_sign: float = 1.0):
    """Cartesian Xi blocks; ``arctan_sign=-1`` gives the literal printed form.

    With the conductor on y > 0 the finite-difference oracle requires
    ``n^2 pi + 2 arctan(y/z)``; the printed ``- 2 arctan`` is inconsistent
    with the cylindrical block and kept only for regression tests.
    """
    r2 = y * y + z * z
    r = math.sqrt(r2)
    z2 = z * z
    ang = n * n * PI + arctan_sign * 2.0 * math.atan(y / z)
    xx = 1.0 / (24.0 * r2 * r) + y / (16.0 * z2 * r2) + ang / (32.0 * z ** 3)
    xy = ((5.0 * y * y - z2) / (48.0 * r2 * r2 * r) + y ** 3 / (16.0 * z2 * r2 * r2)
          + ang / (32.0 * z ** 3))
    xz = ((5.0 * z2 - y * y) / (48.0 * r2 * r2 * r)
          + (2.0 * y ** 3 + 3.0 * y * z2) / (16.0 * z2 * r2 * r2)
          + ang / (16.0 * z ** 3))
    return xx, xy, xz


def xi_halfplane_cart(geom: HalfPlaneGeometry, at: CartPoint,
                      mu: Optional[DipoleVariance] = None) -> ShiftBreakdown:
    """Xi_x, Xi_y, Xi_z; x along the edge, conductor on y > 0."""
    _check_halfplane_cart(at.y, at.z)
    xi = _halfplane_cart_terms(geom.n, at.y, at.z)
    return _finish(xi, Basis.CARTESIAN, halfplane_prefactor(geom), -1, mu)


def xi_halfplane_iso(geom: HalfPlaneGeometry, at: CartPoint) -> float:
    """Xi_x + Xi_y + Xi_z in one expression.

    For an isotropic atom Delta E = -prefactor * Xi_iso * m, with m the
    common per-component variance <mu_i^2>.
    """
    _check_halfplane_cart(at.y, at.z)
    y, z = at.y, at.z
    r2 = y * y + z * z
    return (1.0 / (8.0 * r2 ** 1.5) + y / (4.0 * z * z * r2)
            + (geom.eps * PI + 2.0 * math.atan(y / z)) / (8.0 * z ** 3))


# --------------------------------------------------------------------------
# disc
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscShiftKernel:
    R_plus: float
    R_minus: float


def disc_shift_kernel(geom: DiscGeometry, rho: float, z: float) -> DiscShiftKernel:
    half = 0.5 * geom.d
    return DiscShiftKernel(math.hypot(rho + half, z), math.hypot(rho - half, z))


def disc_prefactor(geom: DiscGeometry) -> float:
    return 1.0 / (8.0 * PI ** 2 * (geom.eps + 1.0))


def _check_disc(geom: DiscGeometry, rho: float, z: float) -> None:
    if z <= SURFACE_RTOL * geom.d:
        if rho <= 0.5 * geom.d * (1.0 + SURFACE_RTOL):
            raise DivergenceError("divergence: point on conductor")
        if z <= 0.0:
            raise DomainError("disc shift needs z > 0 (atom above the substrate)")


def xi_disc(geom: DiscGeometry, at: CylPoint,
            mu: Optional[DipoleVariance] = None) -> ShiftBreakdown:
    """Xi_rho, Xi_phi, Xi_z of the disc on a substrate (cylindrical basis)."""
    rho, z, d = at.rho, at.z, geom.d
    _check_disc(geom, rho, z)
    k = disc_shift_kernel(geom, rho, z)
    p = k.R_plus * k.R_minus
    p2, p3 = p * p, p ** 3
    p4, p5 = p2 * p2, p2 * p3
    q = 0.25 * d * d
    a = rho * rho + z * z - q
    rho2, z2 = rho * rho, z * z
    base = math.atan((q - rho2 - z2) / (d * z)) + 0.5 * PI * geom.eps
    xi_rho = (d / p3 * (d * d / 6.0 - rho2)
              + 2.0 * d * rho2 / p4 * a
              + 2.0 * d * rho2 / p5 * a * a
              + (base - d * z / p4 * a * ((q + z2 - rho2) ** 2 + 8.0 * z2 * rho2)) / (4.0 * z ** 3))
    xi_phi = d ** 3 / 6.0 / p3 + (base - d * z / p2 * a) / (4.0 * z ** 3)
    xi_z = (-d / p3 * (d * d / 12.0 + z2)
            + 2.0 * d * z2 / p5 * (rho2 + z2 + q) ** 2
            - d * rho2 / p4 * a
            + (base + d * z / p2 * (q - rho2 + z2)) / (2.0 * z ** 3))
    return _finish((xi_rho, xi_phi, xi_z), Basis.CYLINDRICAL, disc_prefactor(geom), -1, mu)


# --------------------------------------------------------------------------
# bowl
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BowlShiftKernel:
    s2: float
    abs_s2: float


# Calibrated against shift_numeric on the Kelvin-composed bowl Green's
# function: s^6 means |s^2|^3, and the z block carries (s^2 + d^2/2)^2.
BOWL_S6 = "abs"
BOWL_Z_SHIFT = 0.5


def bowl_prefactor(geom: BowlGeometry) -> float:
    return 1.0 / (16.0 * PI ** 2)


def bowl_distance(geom: BowlGeometry, p) -> float:
    """Distance from ``p`` to the bowl surface (hemisphere z <= 0)."""
    x, y, z = as_vec(p)
    a = 0.5 * geom.d
    if z <= 0.0:
        return abs(math.sqrt(x * x + y * y + z * z) - a)
    return math.hypot(math.hypot(x, y) - a, z)


def _bowl_terms(d: float, x: float, y: float, z: float, s6_mode: str = BOWL_S6,
                z_shift: float = BOWL_Z_SHIFT):
    s2 = x * x + y * y + z * z - 0.25 * d * d
    s4 = s2 * s2
    s6 = abs(s2) ** 3 if s6_mode == "abs" else s2 ** 3
    w = s4 + d * d * z * z
    ang = math.atan(d * z / abs(s2)) - 0.5 * PI
    q = 0.25 * d * d

    def xi_lateral(u: float) -> float:
        u2 = u * u
        return (d * d * z / w * (u2 / w + (u2 + q) / s4)
                - 2.0 * d * u2 * s4 / w ** 2.5
                - d / w ** 1.5 * (d * d / 6.0 - u2)
                + d * (u2 + q) / s6 * ang)

    z2 = z * z
    xi_z = (d * d * z / w * ((z2 - q) / w + (2.0 * q - x * x - y * y) / s4 + d * d * z2 / (s2 * w))
            - 2.0 * d * z2 * (s2 + z_shift * d * d) ** 2 / w ** 2.5
            + d / w ** 1.5 * (d * d / 12.0 + z2)
            + d * (z2 + q) / s6 * ang)
    return xi_lateral(x), xi_lateral(y), xi_z


def xi_bowl(geom: BowlGeometry, at: CartPoint,
            mu: Optional[DipoleVariance] = None) -> ShiftBreakdown:
    """Xi_x, Xi_y, Xi_z of the bowl; Xi_y(x, y, z) = Xi_x(y, x, z)."""
    d = geom.d
    if bowl_distance(geom, at) <= SURFACE_RTOL * d:
        raise DivergenceError("divergence: point on conductor")
    s2 = at.x ** 2 + at.y ** 2 + at.z ** 2 - 0.25 * d * d
    if abs(s2) <= 1e-12 * d * d:
        raise SingularPointError("bowl Xi kernel is singular on the sphere s^2 = 0")
    xi = _bowl_terms(d, at.x, at.y, at.z)
    return _finish(xi, Basis.CARTESIAN, bowl_prefactor(geom), +1, mu)


# --------------------------------------------------------------------------
# geometry-level helpers
# --------------------------------------------------------------------------

def closed_form_xi(geometry: Geometry, p, mu: Optional[DipoleVariance] = None) -> ShiftBreakdown:
    """Xi block at Cartesian point ``p`` in the geometry's frame."""
    p = CartPoint.from_array(as_vec(p))
    if isinstance(geometry, HalfPlaneGeometry):
        return xi_halfplane_cart(geometry, p, mu)
    if isinstance(geometry, DiscGeometry):
        return xi_disc(geometry, cart_to_cyl(p, AxisMap.STANDARD), mu)
    if isinstance(geometry, BowlGeometry):
        return xi_bowl(geometry, p, mu)
    raise TypeError(f"unknown geometry {geometry!r}")


def shift_function(geometry: Geometry, mu: DipoleVariance) -> Callable[[np.ndarray], float]:
    """Closed-form Delta E as a function of a Cartesian point."""
    def energy(p) -> float:
        return closed_form_xi(geometry, p, mu).delta_e
    return energy


def green_for(geometry: Geometry) -> GreensEval:
    """Green's function evaluator in the same Cartesian frame as the closed forms."""
    if isinstance(geometry, HalfPlaneGeometry):
        return Reframed(HalfPlaneGreen(geometry), HALF_PLANE_FRAME)
    if isinstance(geometry, DiscGeometry):
        return BareDiscGreen(geometry) if geometry.n == 1.0 else DiscGreen(geometry)
    if isinstance(geometry, BowlGeometry):
        return bowl_green(geometry)
    raise TypeError(f"unknown geometry {geometry!r}")


def boundary_distance(geometry: Geometry, p) -> float:
    """Distance over which the geometry's Green's function stays smooth.

    For the bowl this also includes the distance to the rest of the sphere,
    since the bowl evaluator needs both points on one side of it.
    """
    x, y, z = as_vec(p)
    if isinstance(geometry, HalfPlaneGeometry) and geometry.n == 1.0:
        # no substrate: only the conductor on y >= 0 limits the stencil
        return math.hypot(min(y, 0.0), z)
    if isinstance(geometry, DiscGeometry) and geometry.n == 1.0:
        return math.hypot(max(math.hypot(x, y) - 0.5 * geometry.d, 0.0), z)
    if isinstance(geometry, (HalfPlaneGeometry, DiscGeometry)):
        return abs(z)
    if isinstance(geometry, BowlGeometry):
        return min(bowl_distance(geometry, p),
                   abs(math.sqrt(x * x + y * y + z * z) - 0.5 * geometry.d))
    raise TypeError(f"unknown geometry {geometry!r}")


# --------------------------------------------------------------------------
# finite-difference oracle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FDScheme:
    h_rel: float = 1e-3
    richardson_levels: int = 2

    def __post_init__(self):
        if not 0.0 < self.h_rel < 1e-2:
            raise DomainError("h_rel must lie in (0, 1e-2)")
        if self.richardson_levels < 1:
            raise DomainError("richardson_levels must be >= 1")


def richardson(values, ratio: float = 2.0, order: int = 2) -> float:
    """Extrapolate estimates at steps h, h/ratio, h/ratio^2, ... (error in even powers)."""
    table = [float(v) for v in values]
    power = order
    while len(table) > 1:
        f = ratio ** power
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
        power += 2
    return table[0]


def mixed_second(g: GreensEval, at, u, h: float) -> float:
    """Four-point estimate of d/du d/du' G_H at r = r' = at."""
    at = as_vec(at)
    u = as_vec(u)
    plus, minus = at + h * u, at - h * u
    return (g.homogeneous(plus, plus) - g.homogeneous(plus, minus)
            - g.homogeneous(minus, plus) + g.homogeneous(minus, minus)) / (4.0 * h * h)


def _directions(mu: DipoleVariance, at: np.ndarray):
    if mu.basis is Basis.CARTESIAN:
        return np.eye(3)
    rho = math.hypot(at[0], at[1])
    if rho > 0.0:
        c, s = at[0] / rho, at[1] / rho
    else:
        phi = mu.at.phi if mu.at is not None else 0.0
        c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def mixed_derivatives(g: GreensEval, at, mu: DipoleVariance,
                      scheme: FDScheme = FDScheme(), *, delta: float) -> np.ndarray:
    """Richardson-extrapolated d_i d_i' G_H along the three basis directions."""
    at = as_vec(at)
    h = scheme.h_rel * delta
    if not delta > 0.0 or 10.0 * h > delta:
        raise StepTooLargeError(f"step {h:.3g} too large for boundary distance {delta:.3g}")
    out = np.empty(3)
    for i, u in enumerate(_directions(mu, at)):
        if not g.valid(at + h * u, at - h * u):
            raise StepTooLargeError("finite-difference stencil leaves the valid region")
        steps = [h / 2.0 ** j for j in range(scheme.richardson_levels + 1)]
        out[i] = richardson([mixed_second(g, at, u, s) for s in steps])
    return out


def shift_numeric(g: GreensEval, at, mu: DipoleVariance,
                  scheme: FDScheme = FDScheme(), *, delta: float) -> float:
    """Delta E = (1/2) sum_i <mu_i^2> d_i d_i' G_H at coincidence, by finite differences.

    Parameters
    ----------
    g : GreensEval
        Green's function; only its homogeneous part is used.
    at : CartPoint or 3-vector
        Atom position in ``g``'s frame.
    mu : DipoleVariance
        Cartesian variances, or cylindrical ones along the local
        (rho, phi, z) unit vectors at ``at`` (STANDARD axis map).
    scheme : FDScheme
        Step is ``scheme.h_rel * delta``.
    delta : float
        Distance from ``at`` to the nearest boundary of ``g``'s smooth region.
    """
    second = mixed_derivatives(g, at, mu, scheme, delta=delta)
    return 0.5 * float(np.dot(mu.components, second))


def fd_observed_order(g: GreensEval, at, u, h: float) -> float:
    """Observed convergence order of the un-extrapolated mixed stencil."""
    d0, d1, d2 = (mixed_second(g, at, u, h / 2.0 ** j) for j in range(3))
    return math.log2(abs(d0 - d1) / abs(d1 - d2))


def force(shift_fn: Callable[[np.ndarray], float], at, scheme: FDScheme = FDScheme(),
          scale: Optional[float] = None) -> np.ndarray:
    """-grad Delta E by Richardson-extrapolated central differences.

    ``scale`` sets the step (``scheme.h_rel * scale``); pass the distance to
    the nearest surface.  Defaults to |at| (or 1 at the origin).
    """
    at = as_vec(at)
    if scale is None:
        scale = float(np.linalg.norm(at)) or 1.0
    h = scheme.h_rel * scale
    grad = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        ests = []
        for j in range(scheme.richardson_levels + 1):
            s = h / 2.0 ** j
            ests.append((shift_fn(at + s * e) - shift_fn(at - s * e)) / (2.0 * s))
        grad[i] = richardson(ests)
    return -grad


def shift_closed(geometry: Geometry, p, mu: DipoleVariance) -> float:
    return assemble_shift(closed_form_xi(geometry, p), mu)
