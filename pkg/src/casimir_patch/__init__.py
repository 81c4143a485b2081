"""Electrostatic Green's functions and Casimir-Polder shifts near conducting patches.

Geometries: a conducting half-plane or disc on a dielectric substrate
(refractive index n) and a conducting hemispherical bowl.  Units are
reduced (epsilon_0 = 1); see :func:`casimir_patch.core.energy_to_si`.
"""
from .core import (
    AxisMap,
    Basis,
    BasisMismatchError,
    BowlGeometry,
    CartPoint,
    CasimirError,
    ConfigurationError,
    CylPoint,
    DipoleVariance,
    DiscGeometry,
    DivergenceError,
    DomainError,
    HalfPlaneGeometry,
    ShiftBreakdown,
    SingularPointError,
    StepTooLargeError,
    ToleranceNotMetError,
    UnsupportedRegionError,
    assemble_shift,
    cart_to_cyl,
    cyl_to_cart,
    energy_to_si,
)
from .fieldmap import Axis, FieldRecord, GridSpec, Quantity, Status, sample_grid
from .greens import (
    DiscGreen,
    FreeSpaceGreen,
    FunctionGreen,
    GreensEval,
    HalfPlaneGreen,
    SeriesParams,
    disc_closed,
    disc_homogeneous,
    free_space,
    halfplane_closed,
    halfplane_homogeneous,
    halfplane_series,
    homogeneous,
)
from .kelvin import (
    KelvinSphere,
    bowl_green,
    disc_from_halfplane,
    invert_point,
    transform_green,
)
from .shifts import (
    FDScheme,
    closed_form_xi,
    force,
    green_for,
    shift_numeric,
    xi_bowl,
    xi_disc,
    xi_halfplane_cart,
    xi_halfplane_cyl,
    xi_halfplane_iso,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
