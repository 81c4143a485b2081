"""Coordinates, scene descriptors, dipole variances and energy assembly.

Everything is in reduced units: ``epsilon_0 = 1`` and lengths are plain
numbers, so the free-space Green's function is ``1 / (4 pi |r - r'|)``.
Use :func:`energy_to_si` to convert an energy computed with variances in
C^2 m^2 and lengths measured in units of ``length_scale`` metres.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.constants import epsilon_0

TWO_PI = 2.0 * math.pi


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CasimirError, ValueError):
    """A point or parameter lies outside the domain of a formula."""


class DivergenceError(DomainError):
    """The requested quantity diverges (point on a conductor)."""


class UnsupportedRegionError(DomainError):
    """The point pair lies in a region the evaluator does not cover."""


class SingularPointError(DomainError):
    """Evaluation at the centre of an inversion sphere or a singular kernel."""


class BasisMismatchError(CasimirError, ValueError):
    pass


class ToleranceNotMetError(CasimirError, RuntimeError):
    """Raised by the series oracle; ``partial`` holds the value reached."""

    def __init__(self, message: str, partial: float, error_estimate: float):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate


class StepTooLargeError(CasimirError, ValueError):
    pass


class ConfigurationError(CasimirError, ValueError):
    pass


@dataclass(frozen=True)
class CartPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise DomainError(f"non-finite coordinate in {self!r}")

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype or float)

    @classmethod
    def from_array(cls, a) -> "CartPoint":
        x, y, z = (float(v) for v in a)
        return cls(x, y, z)


@dataclass(frozen=True)
class CylPoint:
    rho: float
    phi: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.phi) and math.isfinite(self.z)):
            raise DomainError(f"non-finite coordinate in {self!r}")
        if self.rho < 0.0:
            raise DomainError(f"rho must be >= 0, got {self.rho}")
        if not 0.0 <= self.phi <= TWO_PI:
            raise DomainError(f"phi must lie in [0, 2pi], got {self.phi}")


class AxisMap(enum.Enum):
    """How cylindrical (rho, phi, z) sit inside a Cartesian frame.

    ``STANDARD``: x = rho cos(phi), y = rho sin(phi), z = z.  Used for the
    disc (axis along the disc normal) and for the half-plane in the frame
    where the conductor is {y = 0, x >= 0} and the substrate fills y < 0.

    ``HALF_PLANE``: x = z, y = rho cos(phi), z = rho sin(phi).  Edge along
    x, surface normal along z, conductor on the y > 0 side.
    """

    STANDARD = "standard"
    HALF_PLANE = "half_plane"


def cyl_to_cart(p: CylPoint, convention: AxisMap = AxisMap.STANDARD) -> CartPoint:
    a = p.rho * math.cos(p.phi)
    b = p.rho * math.sin(p.phi)
    if convention is AxisMap.STANDARD:
        return CartPoint(a, b, p.z)
    return CartPoint(p.z, a, b)


def cart_to_cyl(p: CartPoint, convention: AxisMap = AxisMap.STANDARD) -> CylPoint:
    """Inverse of :func:`cyl_to_cart`; phi is returned in [0, 2pi)."""
    if convention is AxisMap.STANDARD:
        a, b, axial = p.x, p.y, p.z
    else:
        axial, a, b = p.x, p.y, p.z
    phi = math.atan2(b, a)
    if phi < 0.0:
        phi += TWO_PI
        if phi >= TWO_PI:  # -0.0 rounding
            phi = 0.0
    return CylPoint(math.hypot(a, b), phi, axial)


@dataclass(frozen=True)
class HalfPlaneGeometry:
    n: float = 1.0

    def __post_init__(self):
        if not self.n >= 1.0:
            raise DomainError(f"refractive index must be >= 1, got {self.n}")

    @property
    def eps(self) -> float:
        return self.n * self.n


@dataclass(frozen=True)
class DiscGeometry:
    d: float = 1.0
    n: float = 1.0

    def __post_init__(self):
        if not self.d > 0.0:
            raise DomainError(f"disc diameter must be > 0, got {self.d}")
        if not self.n >= 1.0:
            raise DomainError(f"refractive index must be >= 1, got {self.n}")

    @property
    def eps(self) -> float:
        return self.n * self.n


@dataclass(frozen=True)
class BowlGeometry:
    """Hemispherical bowl x^2 + y^2 + z^2 = d^2/4, z <= 0 (no substrate)."""

    d: float = 1.0

    def __post_init__(self):
        if not self.d > 0.0:
            raise DomainError(f"sphere diameter must be > 0, got {self.d}")


Geometry = Union[HalfPlaneGeometry, DiscGeometry, BowlGeometry]


class Basis(enum.Enum):
    CYLINDRICAL = "cylindrical"
    CARTESIAN = "cartesian"


@dataclass(frozen=True)
class DipoleVariance:
    """Diagonal dipole second moments <mu_i^2>.

    For the cylindrical basis the components are (rho, phi, z) along the
    local unit vectors at ``at``; ``at`` may be left unset when the
    variances are only used with closed forms evaluated at a known point.
    """

    basis: Basis
    m1: float
    m2: float
    m3: float
    at: Optional[CylPoint] = None

    def __post_init__(self):
        for v in (self.m1, self.m2, self.m3):
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"dipole variances must be finite and >= 0, got {v}")

    @classmethod
    def cartesian(cls, mx: float, my: float, mz: float) -> "DipoleVariance":
        return cls(Basis.CARTESIAN, mx, my, mz)

    @classmethod
    def cylindrical(cls, m_rho: float, m_phi: float, m_z: float,
                    at: Optional[CylPoint] = None) -> "DipoleVariance":
        return cls(Basis.CYLINDRICAL, m_rho, m_phi, m_z, at)

    @classmethod
    def isotropic(cls, mu2: float, basis: Basis = Basis.CARTESIAN) -> "DipoleVariance":
        """Isotropic atom with total <mu^2> = ``mu2`` (each component mu2/3)."""
        m = mu2 / 3.0
        return cls(basis, m, m, m)

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.m1, self.m2, self.m3)

    @property
    def is_isotropic(self) -> bool:
        return self.m1 == self.m2 == self.m3

    def scaled(self, factor: float) -> "DipoleVariance":
        return DipoleVariance(self.basis, factor * self.m1, factor * self.m2,
                              factor * self.m3, self.at)

    def in_basis(self, basis: Basis) -> "DipoleVariance":
        """Re-label the basis; only allowed for isotropic variances."""
        if basis is self.basis:
            return self
        if not self.is_isotropic:
            raise BasisMismatchError(
                "anisotropic variances cannot be moved between bases; "
                f"supply them in the {basis.value} basis")
        return DipoleVariance(basis, self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class ShiftBreakdown:
    """Xi components for one point and the constants that turn them into an energy.

    ``delta_e = sign * prefactor * (xi1 m1 + xi2 m2 + xi3 m3)``; ``sign`` is
    -1 for the half-plane and disc and +1 for the bowl.  ``delta_e`` is
    ``None`` when no variances were supplied.
    """

    xi1: float
    xi2: float
    xi3: float
    basis: Basis
    prefactor: float
    sign: int
    delta_e: Optional[float] = None

    @property
    def xi(self) -> tuple[float, float, float]:
        return (self.xi1, self.xi2, self.xi3)

    @property
    def xi_trace(self) -> float:
        return self.xi1 + self.xi2 + self.xi3

    def with_variances(self, mu: DipoleVariance) -> "ShiftBreakdown":
        return ShiftBreakdown(self.xi1, self.xi2, self.xi3, self.basis,
                              self.prefactor, self.sign, assemble_shift(self, mu))

    def contributions(self, mu: DipoleVariance) -> tuple[float, float, float]:
        """Per-component energies; they sum to the total shift."""
        mu = _check_basis(self, mu)
        c = self.sign * self.prefactor
        return (c * self.xi1 * mu.m1, c * self.xi2 * mu.m2, c * self.xi3 * mu.m3)


def _check_basis(xi: ShiftBreakdown, mu: DipoleVariance) -> DipoleVariance:
    if xi.basis is mu.basis:
        return mu
    if mu.is_isotropic:
        return mu.in_basis(xi.basis)
    raise BasisMismatchError(
        f"Xi block is {xi.basis.value} but variances are {mu.basis.value}; "
        "rotate the variances into the Xi basis first")


def assemble_shift(xi: ShiftBreakdown, mu: DipoleVariance) -> float:
    """Energy shift from a Xi block and matching dipole variances.

    Isotropic variances are accepted in either basis since the trace is
    basis independent; anisotropic ones must match ``xi.basis``.
    """
    mu = _check_basis(xi, mu)
    return xi.sign * xi.prefactor * (xi.xi1 * mu.m1 + xi.xi2 * mu.m2 + xi.xi3 * mu.m3)


def energy_to_si(delta_e: float, length_scale: float) -> float:
    """Convert a reduced energy to joules.

    ``delta_e`` must have been computed with <mu_i^2> in C^2 m^2 and all
    lengths in units of ``length_scale`` metres.
    """
    return delta_e / (epsilon_0 * length_scale ** 3)


def as_vec(p) -> np.ndarray:
    """Coerce a CartPoint or any length-3 sequence to a float array."""
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise DomainError(f"expected a 3-vector, got shape {a.shape}")
    return a
