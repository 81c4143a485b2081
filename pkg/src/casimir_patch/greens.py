"""Electrostatic Green's functions for the conductor-patched substrate.

Evaluators (:class:`GreensEval` subclasses) work on Cartesian 3-vectors in
their own frame and expose ``full``, ``homogeneous`` and ``valid``.  The
closed forms are also available as plain functions of cylindrical points.

Frames
------
Half-plane: conductor {y = 0, x >= 0}, substrate y < 0, edge along z,
i.e. :attr:`AxisMap.STANDARD` with the conductor at phi = 0 and 2 pi and
the substrate surface at phi = pi.

Disc: disc of diameter d at z = 0 centred on the origin, substrate z < 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import jv

from .core import (
    TWO_PI,
    CartPoint,
    CylPoint,
    DiscGeometry,
    DomainError,
    HalfPlaneGeometry,
    ToleranceNotMetError,
    UnsupportedRegionError,
    as_vec,
)

FOUR_PI = 4.0 * math.pi


def _sgn(x: float) -> float:
    return 1.0 if x >= 0.0 else -1.0


def _atan_over(t: float) -> float:
    """atan(t)/t, finite at t = 0."""
    if t < 1e-4:
        t2 = t * t
        return 1.0 - t2 / 3.0 + t2 * t2 / 5.0
    return math.atan(t) / t


def free_space(r, rp) -> float:
    """Potential 1/(4 pi |r - r'|) of a unit charge in vacuum."""
    dist = float(np.linalg.norm(as_vec(r) - as_vec(rp)))
    if dist == 0.0:
        raise DomainError("free-space Green's function is singular at r = r'")
    return 1.0 / (FOUR_PI * dist)


class GreensEval:
    """Scalar field of two points with a homogeneous-part companion.

    Subclasses implement :meth:`full` and :meth:`valid`; the default
    :meth:`homogeneous` subtracts the free-space potential, which loses
    precision near coincidence, so closed forms override it.
    """

    def full(self, r, rp) -> float:
        raise NotImplementedError

    def homogeneous(self, r, rp) -> float:
        return self.full(r, rp) - free_space(r, rp)

    def valid(self, r, rp) -> bool:
        return True

    def __call__(self, r, rp) -> float:
        return self.full(r, rp)


class FreeSpaceGreen(GreensEval):
    def full(self, r, rp) -> float:
        return free_space(r, rp)

    def homogeneous(self, r, rp) -> float:
        return 0.0


class FunctionGreen(GreensEval):
    """Wrap plain callables, e.g. an explicit image-charge construction."""

    def __init__(self, full: Callable, homogeneous: Optional[Callable] = None,
                 valid: Optional[Callable] = None):
        self._full = full
        self._homogeneous = homogeneous
        self._valid = valid

    def full(self, r, rp) -> float:
        return self._full(as_vec(r), as_vec(rp))

    def homogeneous(self, r, rp) -> float:
        if self._homogeneous is None:
            return super().homogeneous(r, rp)
        return self._homogeneous(as_vec(r), as_vec(rp))

    def valid(self, r, rp) -> bool:
        return True if self._valid is None else bool(self._valid(as_vec(r), as_vec(rp)))


class Reframed(GreensEval):
    """``g`` seen from another Cartesian frame: p_old = matrix @ p_new + offset.

    ``matrix`` must be orthogonal so harmonicity and distances are kept.
    """

    def __init__(self, g: GreensEval, matrix, offset=(0.0, 0.0, 0.0)):
        self.g = g
        self.matrix = np.asarray(matrix, dtype=float)
        self.offset = np.asarray(offset, dtype=float)
        if not np.allclose(self.matrix @ self.matrix.T, np.eye(3), atol=1e-14):
            raise DomainError("frame change must be orthogonal")

    def to_inner(self, p) -> np.ndarray:
        return self.matrix @ as_vec(p) + self.offset

    def full(self, r, rp) -> float:
        return self.g.full(self.to_inner(r), self.to_inner(rp))

    def homogeneous(self, r, rp) -> float:
        return self.g.homogeneous(self.to_inner(r), self.to_inner(rp))

    def valid(self, r, rp) -> bool:
        return self.g.valid(self.to_inner(r), self.to_inner(rp))


def homogeneous(g: GreensEval, r, rp) -> float:
    """Homogeneous part ``G - 1/(4 pi |r - r'|)`` of any evaluator."""
    return g.homogeneous(r, rp)


# --------------------------------------------------------------------------
# half-plane on a substrate
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlaneKernel:
    F_plus: float
    F_minus: float
    D_plus: float
    D_minus: float
    eta_plus: float
    eta_minus: float
    eps_phi: float


def _half_angle(x: float, y: float, phi: float) -> tuple[float, float]:
    """sqrt(rho) cos(phi/2) and sqrt(rho) sin(phi/2) without cancellation."""
    rho = math.hypot(x, y)
    if x >= 0.0:
        c = math.sqrt(0.5 * (rho + x))
        s = abs(y) / (2.0 * c) if c > 0.0 else 0.0
    else:
        s = math.sqrt(0.5 * (rho - x))
        c = abs(y) / (2.0 * s)
    return (c if phi <= math.pi else -c), s


def _hp_kernel_xyz(eps: float, r: tuple, rp: tuple) -> HalfPlaneKernel:
    """Kernel from (x, y, z, phi) tuples in the STANDARD half-plane frame.

    eta_+- F_+- = 2 sqrt(rho rho') cos((phi +- phi')/2) is built from
    per-point half-angle factors, so F and its sign come from one number
    and the product stays continuous where F passes through zero.  D_- is
    |r - r'| and D_+ the distance to r' mirrored in y = 0.
    """
    x, y, z, phi = r
    xp, yp, zp, phip = rp
    c, s = _half_angle(x, y, phi)
    cp, sp = _half_angle(xp, yp, phip)
    plus = 2.0 * (c * cp - s * sp)
    minus = 2.0 * (c * cp + s * sp)
    dz2 = (z - zp) ** 2
    return HalfPlaneKernel(
        F_plus=abs(plus),
        F_minus=abs(minus),
        D_plus=math.sqrt((x - xp) ** 2 + (y + yp) ** 2 + dz2),
        D_minus=math.sqrt((x - xp) ** 2 + (y - yp) ** 2 + dz2),
        eta_plus=_sgn(plus),
        eta_minus=_sgn(minus),
        eps_phi=1.0 if phi <= math.pi else eps,
    )


def _xyzphi(p: CylPoint) -> tuple:
    return (p.rho * math.cos(p.phi), p.rho * math.sin(p.phi), p.z, p.phi)


def halfplane_kernel(geom: HalfPlaneGeometry, r: CylPoint, rp: CylPoint) -> HalfPlaneKernel:
    return _hp_kernel_xyz(geom.eps, _xyzphi(r), _xyzphi(rp))


def _check_halfplane_args(r: CylPoint, rp: CylPoint) -> None:
    if not 0.0 < rp.phi < math.pi:
        raise UnsupportedRegionError(
            f"source must lie above the substrate (0 < phi' < pi), got phi'={rp.phi}")
    if r == rp:
        raise DomainError("Green's function is singular at r = r'")


def _on_halfplane_conductor(r: CylPoint) -> bool:
    return r.phi == 0.0 or r.phi == TWO_PI


def halfplane_closed(geom: HalfPlaneGeometry, r: CylPoint, rp: CylPoint) -> float:
    """Closed-form Green's function of a conducting half-plane on a substrate.

    The source must be in vacuum (0 < phi' < pi); the observation point may
    be anywhere, including inside the substrate (pi < phi < 2 pi).
    """
    _check_halfplane_args(r, rp)
    if _on_halfplane_conductor(r):
        return 0.0
    return _hp_full(geom.eps, _xyzphi(r), _xyzphi(rp))


def _hp_full(eps: float, r: tuple, rp: tuple) -> float:
    k = _hp_kernel_xyz(eps, r, rp)
    if k.D_minus == 0.0 or k.D_plus == 0.0:
        raise DomainError("Green's function is singular at r = r' (or its mirror image)")
    eps_ratio = eps / k.eps_phi
    minus = (eps_ratio + 2.0 * k.eta_minus / math.pi * math.atan2(k.F_minus, k.D_minus)) / k.D_minus
    plus = (eps_ratio + 2.0 * k.eta_plus / math.pi * math.atan2(k.F_plus, k.D_plus)) / k.D_plus
    return (minus - plus) / (FOUR_PI * (eps + 1.0))


def _singular_term(F: float, D: float) -> float:
    """(1/D)[(2/pi) atan(F/D) - 1] = -(2/pi) atan(D/F)/D, stable as D -> 0."""
    if F == 0.0:
        return -1.0 / D
    return -(2.0 / math.pi) * _atan_over(D / F) / F


def _hp_homogeneous(eps: float, r: tuple, rp: tuple) -> float:
    if r[3] > math.pi:
        k = _hp_kernel_xyz(eps, r, rp)
        return _hp_full(eps, r, rp) - 1.0 / (FOUR_PI * k.D_minus)
    k = _hp_kernel_xyz(eps, r, rp)
    minus = _singular_term(k.F_minus, k.D_minus)
    plus = (eps + 2.0 * k.eta_plus / math.pi * math.atan2(k.F_plus, k.D_plus)) / k.D_plus
    return (minus - plus) / (FOUR_PI * (eps + 1.0))


def halfplane_homogeneous(geom: HalfPlaneGeometry, r: CylPoint, rp: CylPoint) -> float:
    """Homogeneous part, smooth through r = r' for points in vacuum."""
    if not 0.0 < rp.phi < math.pi:
        raise UnsupportedRegionError("source must lie above the substrate")
    return _hp_homogeneous(geom.eps, _xyzphi(r), _xyzphi(rp))


def _cyl_distance(r: CylPoint, rp: CylPoint) -> float:
    return math.sqrt(max(0.0, r.rho ** 2 + rp.rho ** 2
                         - 2.0 * r.rho * rp.rho * math.cos(r.phi - rp.phi)
                         + (r.z - rp.z) ** 2))


@dataclass(frozen=True)
class SeriesParams:
    """Truncation controls for the eigenfunction-series oracle.

    ``k_max=None`` picks the cutoff from the e^{-k|dz|} tail bound.
    """

    m_max: int = 400
    k_max: Optional[float] = None
    quad_tol: float = 1e-9
    gauss_order: int = 20
    block: int = 16

    def __post_init__(self):
        if self.m_max < 1:
            raise DomainError("m_max must be >= 1")
        if self.k_max is not None and not self.k_max > 0.0:
            raise DomainError("k_max must be > 0")
        if not self.quad_tol > 0.0:
            raise DomainError("quad_tol must be > 0")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    error_estimate: float
    terms: int
    k_max: float


def _k_nodes(k_max: float, width: float, order: int):
    panels = max(1, int(math.ceil(k_max / width)))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, k_max, panels + 1)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    return (half * x + 0.5 * (a + b)).ravel(), (half * w).ravel()


def halfplane_series_detail(geom: HalfPlaneGeometry, r: CylPoint, rp: CylPoint,
                            params: SeriesParams = SeriesParams()) -> SeriesResult:
    """Eigenfunction series with the kappa integral done analytically.

    Each mode contributes (1/2pi) c_nu sin(nu phi) sin(nu phi')
    * int_0^inf exp(-k|dz|) J_nu(k rho) J_nu(k rho') dk, which is
    integrated by composite Gauss-Legendre on [0, k_max].  The error
    estimate combines a lower-order rule on the same panels, the
    exponential tail beyond k_max and the size of the last mode block.
    """
    _check_halfplane_args(r, rp)
    if _on_halfplane_conductor(r):
        return SeriesResult(0.0, 0.0, 0, 0.0)
    scale = max(r.rho, rp.rho, abs(r.z - rp.z))
    dz = abs(r.z - rp.z)
    if dz < 1e-3 * scale:
        raise DomainError("series oracle needs |z - z'| >= 1e-3 * scale")
    eps = geom.eps
    tol = params.quad_tol
    c_even = 2.0 * eps / (eps + 1.0)
    c_odd = 2.0 / (eps + 1.0)
    # tail: sum_nu |J J| <= 2, so the k > K remainder is below c e^{-K dz}/(pi dz)
    g_scale = 1.0 / (FOUR_PI * _cyl_distance(r, rp))
    k_tail = math.log(max(c_even, c_odd) / (math.pi * dz * tol * 1e-3 * g_scale) + 1.0) / dz
    k_max = k_tail if params.k_max is None else params.k_max
    tail_bound = max(c_even, c_odd) * math.exp(-k_max * dz) / (math.pi * dz) / TWO_PI
    # one Bessel-product oscillation (or one decay length) per panel
    width = min(TWO_PI / max(r.rho + rp.rho, 1e-300), 4.0 / dz)
    k_hi, w_hi = _k_nodes(k_max, width, params.gauss_order)
    k_lo, w_lo = _k_nodes(k_max, width, max(4, params.gauss_order // 2))
    damp_hi = np.exp(-k_hi * dz) * w_hi
    damp_lo = np.exp(-k_lo * dz) * w_lo

    if r.phi <= math.pi:
        # vacuum observation: integer orders weighted n^2, half-integer ones 1
        families = [(c_even, 1.0), (c_odd, 0.5)]
        step = 1.0
    else:
        families = [(c_odd, None)]
        step = 0.5

    def block_sum(nus: np.ndarray, coeff: float):
        ang = coeff * np.sin(nus * r.phi) * np.sin(nus * rp.phi)
        hi = (jv(nus[:, None], k_hi * r.rho) * jv(nus[:, None], k_hi * rp.rho)) @ damp_hi
        lo = (jv(nus[:, None], k_lo * r.rho) * jv(nus[:, None], k_lo * rp.rho)) @ damp_lo
        diff = float(np.abs(ang) @ np.abs(hi - lo))
        resasc = float(np.abs(ang) @ np.abs(hi))
        if resasc > 0.0 and diff > 0.0:
            # QUADPACK-style scaling of the rule difference
            diff = resasc * min(1.0, (200.0 * diff / resasc) ** 1.5)
        return float(ang @ hi), diff

    total = 0.0
    quad_err = 0.0
    last_block = math.inf
    terms = 0
    start = 0
    quiet_blocks = 0
    while terms < params.m_max:
        count = min(params.block, params.m_max - terms)
        idx = np.arange(start, start + count, dtype=float)
        contrib = 0.0
        for coeff, offset in families:
            if offset is None:
                nus = (idx + 1.0) * step
            elif offset == 1.0:
                nus = idx + 1.0
            else:
                nus = idx + 0.5
            s, e = block_sum(nus, coeff)
            contrib += s
            quad_err += e
        total += contrib
        terms += count
        start += count
        last_block = abs(contrib)
        scale_v = max(abs(total), g_scale * 1e-3)
        quiet_blocks = quiet_blocks + 1 if last_block <= 0.1 * tol * scale_v else 0
        if quiet_blocks >= 2:
            break
    value = total / TWO_PI
    err = (quad_err + last_block) / TWO_PI + tail_bound
    if quiet_blocks < 2 or err > tol * max(abs(value), 1e-3 * g_scale):
        raise ToleranceNotMetError(
            f"series not converged after {terms} modes, k_max={k_max:.4g}: "
            f"estimated error {err:.3g}", partial=value, error_estimate=err)
    return SeriesResult(value, err, terms, k_max)


def halfplane_series(geom: HalfPlaneGeometry, r: CylPoint, rp: CylPoint,
                     params: SeriesParams = SeriesParams()) -> float:
    return halfplane_series_detail(geom, r, rp, params).value


def _phi_of(x: float, y: float) -> float:
    phi = math.atan2(y, x)
    if phi < 0.0:
        phi += TWO_PI
    elif phi == 0.0 and math.copysign(1.0, y) < 0.0 and x > 0.0:
        phi = TWO_PI  # y = -0.0 marks the lower face of the conductor
    return min(phi, TWO_PI)


class HalfPlaneGreen(GreensEval):
    """Half-plane evaluator in the STANDARD frame (conductor {y=0, x>=0})."""

    def __init__(self, geom: HalfPlaneGeometry):
        self.geom = geom

    @staticmethod
    def _split(p) -> tuple:
        x, y, z = (float(v) for v in as_vec(p))
        return (x, y, z, _phi_of(x, y))

    def _pair(self, r, rp):
        a, b = self._split(r), self._split(rp)
        if not 0.0 < b[3] < math.pi:
            raise UnsupportedRegionError("source must lie above the substrate (y' > 0)")
        return a, b

    def full(self, r, rp) -> float:
        a, b = self._pair(r, rp)
        if a[3] == 0.0 or a[3] == TWO_PI:
            if a[1] == 0.0 and a[0] >= 0.0:
                return 0.0
        return _hp_full(self.geom.eps, a, b)

    def homogeneous(self, r, rp) -> float:
        a, b = self._pair(r, rp)
        return _hp_homogeneous(self.geom.eps, a, b)

    def valid(self, r, rp) -> bool:
        return as_vec(rp)[1] > 0.0


# --------------------------------------------------------------------------
# disc on a substrate
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscKernel:
    F_minus: float
    F_plus: float
    D_minus: float
    D_plus: float
    eta_plus: float
    eta_minus: float = 1.0


def _disc_uv(half: float, x: float, y: float, z: float) -> tuple[float, float]:
    """Per-point factors with u^2 - v^2 = rho^2 + z^2 - half^2 and u v = half z.

    The disc radicands factor as 2 (u u' -+ v v')^2, which gives F_+- and
    the sign eta_+ from a single product.
    """
    rho = math.hypot(x, y)
    a = rho * rho + z * z - half * half
    big = math.sqrt((z * z + (rho - half) ** 2) * (z * z + (rho + half) ** 2))
    if a >= 0.0:
        u = math.sqrt(0.5 * (big + a))
        v = half * z / u if u > 0.0 else 0.0
    else:
        v = math.sqrt(0.5 * (big - a))
        u = half * abs(z) / v
        v = v if z >= 0.0 else -v  # z = -0.0 counts as the upper side
    return u, v


def _disc_kernel_xyz(d: float, r: tuple, rp: tuple) -> DiscKernel:
    x, y, z = r
    xp, yp, zp = rp
    u, v = _disc_uv(0.5 * d, x, y, z)
    up, vp = _disc_uv(0.5 * d, xp, yp, zp)
    minus = 2.0 / d * (u * up + v * vp)
    plus = 2.0 / d * (v * vp - u * up)  # eta_+ F_+
    lateral = (x - xp) ** 2 + (y - yp) ** 2
    return DiscKernel(
        F_minus=abs(minus),
        F_plus=abs(plus),
        D_minus=math.sqrt(lateral + (z - zp) ** 2),
        D_plus=math.sqrt(lateral + (z + zp) ** 2),
        eta_plus=_sgn(plus),
    )


def _xyz(p: CylPoint) -> tuple:
    return (p.rho * math.cos(p.phi), p.rho * math.sin(p.phi), p.z)


def disc_kernel(geom: DiscGeometry, r: CylPoint, rp: CylPoint) -> DiscKernel:
    return _disc_kernel_xyz(geom.d, _xyz(r), _xyz(rp))


def _disc_pair(n: float, r: tuple, rp: tuple) -> tuple[tuple, tuple]:
    """Validate the pair; reflect both below-plane points when n = 1."""
    if r[2] >= 0.0 and rp[2] > 0.0:
        return r, rp
    if n == 1.0 and r[2] <= 0.0 and rp[2] < 0.0:
        return (r[0], r[1], -r[2]), (rp[0], rp[1], -rp[2])
    raise UnsupportedRegionError(
        "disc Green's function needs both points above the substrate "
        "(z > 0, z' > 0); with n = 1 both may instead be below")


def _disc_full(geom: DiscGeometry, r: tuple, rp: tuple) -> float:
    r, rp = _disc_pair(geom.n, r, rp)
    k = _disc_kernel_xyz(geom.d, r, rp)
    if k.D_minus == 0.0:
        raise DomainError("Green's function is singular at r = r'")
    eps = geom.eps
    minus = (eps + 2.0 / math.pi * math.atan2(k.F_minus, k.D_minus)) / k.D_minus
    plus = (eps + 2.0 * k.eta_plus / math.pi * math.atan2(k.F_plus, k.D_plus)) / k.D_plus
    return (minus - plus) / (FOUR_PI * (eps + 1.0))


def _disc_homogeneous(geom: DiscGeometry, r: tuple, rp: tuple) -> float:
    r, rp = _disc_pair(geom.n, r, rp)
    k = _disc_kernel_xyz(geom.d, r, rp)
    eps = geom.eps
    minus = _singular_term(k.F_minus, k.D_minus)
    plus = (eps + 2.0 * k.eta_plus / math.pi * math.atan2(k.F_plus, k.D_plus)) / k.D_plus
    return (minus - plus) / (FOUR_PI * (eps + 1.0))


def disc_closed(geom: DiscGeometry, r: CylPoint, rp: CylPoint) -> float:
    """Closed-form Green's function of a conducting disc on a substrate.

    Valid for z >= 0 and z' > 0 (observation on the plane z = 0 gives the
    conductor or interface value).  For n = 1 the mirror-symmetric pair
    with both points below the plane is accepted as well.
    """
    return _disc_full(geom, _xyz(r), _xyz(rp))


def disc_homogeneous(geom: DiscGeometry, r: CylPoint, rp: CylPoint) -> float:
    return _disc_homogeneous(geom, _xyz(r), _xyz(rp))


class DiscGreen(GreensEval):
    """Disc evaluator in the disc-centred frame (normal along z)."""

    def __init__(self, geom: DiscGeometry):
        self.geom = geom

    @staticmethod
    def _t(p) -> tuple:
        return tuple(float(v) for v in as_vec(p))

    def full(self, r, rp) -> float:
        return _disc_full(self.geom, self._t(r), self._t(rp))

    def homogeneous(self, r, rp) -> float:
        return _disc_homogeneous(self.geom, self._t(r), self._t(rp))

    def valid(self, r, rp) -> bool:
        z, zp = as_vec(r)[2], as_vec(rp)[2]
        if z >= 0.0 and zp > 0.0:
            return True
        return self.geom.n == 1.0 and z <= 0.0 and zp < 0.0


def on_disc(geom: DiscGeometry, p, atol: float = 0.0) -> bool:
    x, y, z = as_vec(p)
    return abs(z) <= atol and x * x + y * y <= 0.25 * geom.d ** 2


def to_cart(p: CylPoint) -> CartPoint:
    return CartPoint(p.rho * math.cos(p.phi), p.rho * math.sin(p.phi), p.z)
