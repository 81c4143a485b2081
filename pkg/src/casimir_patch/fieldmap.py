"""Grid sampling of potentials, shifts and forces, and their CSV/JSON output."""
from __future__ import annotations

import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    BowlGeometry,
    ConfigurationError,
    DipoleVariance,
    DiscGeometry,
    DivergenceError,
    DomainError,
    Geometry,
    HalfPlaneGeometry,
    as_vec,
)
from .kelvin import disc_from_halfplane
from .shifts import (
    SURFACE_RTOL,
    FDScheme,
    bowl_distance,
    closed_form_xi,
    force,
    green_for,
)

SCHEMA_VERSION = 1
AXIS_NAMES = ("x", "y", "z")


class Quantity(enum.Enum):
    POTENTIAL = "potential"
    SHIFT_ISO = "shift_iso"
    SHIFT_COMPONENTS = "shift_components"
    FORCE = "force"


class Status(enum.Enum):
    OK = "ok"
    IN_MATERIAL = "in_material"
    DIVERGED = "diverged"
    OUT_OF_DOMAIN = "out_of_domain"


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigurationError(f"axis name must be one of x, y, z; got {self.name!r}")
        if self.count < 2:
            raise ConfigurationError("axis count must be >= 2")
        if not self.min < self.max:
            raise ConfigurationError("axis min must be < max")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:min:max:count``."""
        try:
            name, lo, hi, count = text.split(":")
            return cls(name.strip(), float(lo), float(hi), int(count))
        except ValueError as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad axis spec {text!r}; expected name:min:max:count") from None

    def __str__(self) -> str:
        return f"{self.name}:{self.min:.15g}:{self.max:.15g}:{self.count}"


@dataclass(frozen=True)
class GridSpec:
    axis1: Axis
    axis2: Axis
    slice: float = 0.0
    quantity: Quantity = Quantity.FORCE

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigurationError("the two grid axes must differ")
        if not isinstance(self.quantity, Quantity):
            object.__setattr__(self, "quantity", parse_quantity(self.quantity))

    @property
    def slice_axis(self) -> str:
        return next(a for a in AXIS_NAMES if a not in (self.axis1.name, self.axis2.name))

    def point(self, c1: float, c2: float) -> np.ndarray:
        p = {self.axis1.name: c1, self.axis2.name: c2, self.slice_axis: self.slice}
        return np.array([p["x"], p["y"], p["z"]], dtype=float)

    @property
    def size(self) -> int:
        return self.axis1.count * self.axis2.count


def parse_quantity(name) -> Quantity:
    try:
        return Quantity(str(name))
    except ValueError:
        known = ", ".join(q.value for q in Quantity)
        raise ConfigurationError(f"unknown quantity {name!r}; expected one of {known}") from None


@dataclass(frozen=True)
class FieldRecord:
    c1: float
    c2: float
    values: tuple = ()
    status: Status = Status.OK

    def __post_init__(self):
        if self.status is not Status.OK and self.values:
            raise ValueError("non-ok records carry no values")


def value_columns(spec: GridSpec, geometry: Geometry) -> list[str]:
    q = spec.quantity
    if q is Quantity.POTENTIAL:
        return ["G"]
    if q is Quantity.SHIFT_ISO:
        return ["dE_iso"]
    if q is Quantity.SHIFT_COMPONENTS:
        labels = ("rho", "phi", "z") if isinstance(geometry, DiscGeometry) else ("x", "y", "z")
        return [f"dE_{a}" for a in labels]
    return ["F_x", "F_y", "F_z"]


def _classify(geometry: Geometry, p: np.ndarray, quantity: Quantity = Quantity.FORCE) -> Status:
    """Flag points on conductors or inside the substrate.

    Shifts and forces also diverge on a bare substrate surface; the
    potential stays finite there.
    """
    x, y, z = p
    wall = quantity is not Quantity.POTENTIAL and getattr(geometry, "n", 1.0) != 1.0
    if isinstance(geometry, HalfPlaneGeometry):
        scale = max(abs(y), abs(z), 1.0)
        if abs(z) <= SURFACE_RTOL * scale and (y >= 0.0 or wall):
            return Status.DIVERGED
        if z < 0.0:
            return Status.IN_MATERIAL
        return Status.OK
    if isinstance(geometry, DiscGeometry):
        on_plane = abs(z) <= SURFACE_RTOL * geometry.d
        if on_plane and (wall or math.hypot(x, y) <= 0.5 * geometry.d * (1 + SURFACE_RTOL)):
            return Status.DIVERGED
        if z < 0.0 and geometry.n != 1.0:
            return Status.IN_MATERIAL
        return Status.OK
    if bowl_distance(geometry, p) <= SURFACE_RTOL * geometry.d:
        return Status.DIVERGED
    return Status.OK


def _reflect_z(p: np.ndarray) -> np.ndarray:
    return np.array([p[0], p[1], -p[2]])


class _Sampler:
    """Per-point evaluation; picklable so rows can go to worker processes."""

    def __init__(self, geometry, spec, mu, source, scheme):
        self.geometry = geometry
        self.spec = spec
        self.mu = mu
        self.source = None if source is None else as_vec(source)
        self.scheme = scheme
        self.green = green_for(geometry)
        self.composed = disc_from_halfplane(geometry) if isinstance(geometry, DiscGeometry) else None

    def _iso(self) -> DipoleVariance:
        m = sum(self.mu.components) / 3.0
        return DipoleVariance(self.mu.basis, m, m, m)

    def _energy(self, mu: DipoleVariance):
        geometry = self.geometry

        def fn(q) -> float:
            q = as_vec(q)
            if isinstance(geometry, DiscGeometry) and q[2] < 0.0:
                q = _reflect_z(q)  # bare disc only, checked by the caller
            return closed_form_xi(geometry, q, mu).delta_e
        return fn

    def value(self, p: np.ndarray) -> tuple:
        q = self.spec.quantity
        g = self.geometry
        if q is Quantity.POTENTIAL:
            if np.linalg.norm(p - self.source) <= SURFACE_RTOL * max(np.linalg.norm(p), 1.0):
                raise DivergenceError("observation point at the source")
            if self.green.valid(p, self.source):
                return (self.green.full(p, self.source),)
            if self.composed is not None:
                return (self.composed.full(p, self.source),)
            raise DomainError("point pair outside the evaluator's region")
        mirrored = isinstance(g, DiscGeometry) and p[2] < 0.0
        at = _reflect_z(p) if mirrored else p
        if q is Quantity.SHIFT_ISO:
            return (closed_form_xi(g, at, self._iso()).delta_e,)
        if q is Quantity.SHIFT_COMPONENTS:
            return closed_form_xi(g, at).contributions(self.mu)
        scale = _step_scale(g, at)
        f = force(self._energy(self.mu), at, self.scheme, scale=scale)
        if mirrored:
            f[2] = -f[2]
        return tuple(float(v) for v in f)

    def record(self, c1: float, c2: float) -> FieldRecord:
        p = self.spec.point(c1, c2)
        status = _classify(self.geometry, p, self.spec.quantity)
        if status is not Status.OK:
            return FieldRecord(c1, c2, (), status)
        try:
            vals = self.value(p)
        except DivergenceError:
            return FieldRecord(c1, c2, (), Status.DIVERGED)
        except (DomainError, ZeroDivisionError):
            return FieldRecord(c1, c2, (), Status.OUT_OF_DOMAIN)
        if not all(math.isfinite(v) for v in vals):
            return FieldRecord(c1, c2, (), Status.DIVERGED)
        return FieldRecord(c1, c2, tuple(float(v) for v in vals), Status.OK)

    def row(self, c1: float) -> list[FieldRecord]:
        return [self.record(float(c1), float(c2)) for c2 in self.spec.axis2.values]


def _step_scale(geometry: Geometry, p: np.ndarray) -> float:
    """Step scale for force differences: a fraction of the distance to the surface."""
    if isinstance(geometry, BowlGeometry):
        dist = bowl_distance(geometry, p)
        s2 = abs(float(p @ p) - 0.25 * geometry.d ** 2)
        # keep clear of the s^2 = 0 sphere where the Xi kernel is singular
        dist = min(dist, s2 / geometry.d) if s2 > 0 else dist
        return max(dist, 1e-12)
    return max(abs(p[2]), 1e-12)


def sample_grid(geometry: Geometry, spec: GridSpec, mu: Optional[DipoleVariance] = None,
                source=None, scheme: FDScheme = FDScheme(),
                workers: Optional[int] = None) -> list[FieldRecord]:
    """Evaluate ``spec.quantity`` on the grid, row-major over ``axis1``.

    ``source`` is required for potentials and ``mu`` for shifts and forces.
    Points on conductors, inside the substrate or outside a formula's
    domain are returned with a status flag and no values.
    """
    if spec.quantity is Quantity.POTENTIAL:
        if source is None:
            raise ConfigurationError("potential maps need a source point")
        _check_source(geometry, as_vec(source))
    elif mu is None:
        raise ConfigurationError(f"{spec.quantity.value} maps need dipole variances")
    sampler = _Sampler(geometry, spec, mu, source, scheme)
    rows = spec.axis1.values
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(sampler.row, rows))
    else:
        chunks = [sampler.row(c1) for c1 in rows]
    return [rec for chunk in chunks for rec in chunk]


def _check_source(geometry: Geometry, s: np.ndarray) -> None:
    if isinstance(geometry, (HalfPlaneGeometry, DiscGeometry)) and not s[2] > 0.0:
        raise ConfigurationError("the source must lie above the surface (z > 0)")
    if isinstance(geometry, BowlGeometry) and bowl_distance(geometry, s) == 0.0:
        raise ConfigurationError("the source must not lie on the bowl")


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v + 0.0:.15g}"  # + 0.0 turns -0.0 into 0.0


def geometry_params(geometry: Geometry) -> dict:
    if isinstance(geometry, HalfPlaneGeometry):
        return {"geometry": "halfplane", "n": geometry.n}
    if isinstance(geometry, DiscGeometry):
        return {"geometry": "disc", "d": geometry.d, "n": geometry.n}
    return {"geometry": "bowl", "d": geometry.d}


def map_params(geometry: Geometry, spec: GridSpec, mu: Optional[DipoleVariance] = None,
               source=None, extra: Optional[dict] = None) -> dict:
    """Parameter block echoed in output headers, in a fixed key order."""
    params = {"schema": SCHEMA_VERSION}
    params.update(geometry_params(geometry))
    params.update({
        "quantity": spec.quantity.value,
        "axis1": str(spec.axis1),
        "axis2": str(spec.axis2),
        "slice": f"{spec.slice_axis}={_fmt(spec.slice)}",
        "units": "reduced (epsilon_0=1, lengths in geometry units)",
    })
    if mu is not None:
        params["mu_basis"] = mu.basis.value
        params["mu"] = ",".join(_fmt(m) for m in mu.components)
    if source is not None:
        params["source"] = ",".join(_fmt(c) for c in as_vec(source))
    if extra:
        params.update(extra)
    params["columns"] = ",".join([spec.axis1.name, spec.axis2.name]
                                 + value_columns(spec, geometry) + ["status"])
    return params


def _param_text(v) -> str:
    return _fmt(v) if isinstance(v, float) else str(v)


def write_csv(records: Sequence[FieldRecord], params: dict, out) -> None:
    ncols = len(params["columns"].split(",")) - 3
    for k, v in params.items():
        out.write(f"# {k}={_param_text(v)}\n")
    for rec in records:
        vals = [_fmt(v) for v in rec.values] if rec.values else [""] * ncols
        out.write(",".join([_fmt(rec.c1), _fmt(rec.c2), *vals, rec.status.value]) + "\n")


def write_json(records: Sequence[FieldRecord], params: dict, out) -> None:
    doc = {
        "params": {k: (float(_fmt(v)) if isinstance(v, float) else v) for k, v in params.items()},
        "records": [
            {"coord1": float(_fmt(r.c1)), "coord2": float(_fmt(r.c2)),
             "values": [float(_fmt(v)) for v in r.values], "status": r.status.value}
            for r in records
        ],
        "schema": SCHEMA_VERSION,
    }
    json.dump(doc, out, indent=1)
    out.write("\n")


def render_text(records, params, fmt: str = "csv") -> str:
    buf = io.StringIO()
    (write_json if fmt == "json" else write_csv)(records, params, buf)
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[FieldRecord]]:
    """Parse the CSV written by :func:`write_csv`."""
    params: dict = {}
    records = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            params[key] = value
            continue
        parts = line.split(",")
        status = Status(parts[-1])
        vals = tuple(float(v) for v in parts[2:-1] if v != "")
        records.append(FieldRecord(float(parts[0]), float(parts[1]), vals, status))
    return params, records


# --------------------------------------------------------------------------
# figure recipes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Recipe:
    name: str
    description: str
    geometry: Geometry
    spec: GridSpec
    mu: Optional[DipoleVariance] = None
    source: Optional[tuple] = None
    aliases: tuple = field(default=())


def _iso(basis_cyl: bool = False) -> DipoleVariance:
    if basis_cyl:
        return DipoleVariance.cylindrical(1.0, 1.0, 1.0)
    return DipoleVariance.cartesian(1.0, 1.0, 1.0)


RECIPES = {
    r.name: r for r in (
        Recipe("fig2", "half-plane on n=1.5 substrate, isotropic atom, force directions",
               HalfPlaneGeometry(1.5),
               GridSpec(Axis("y", -2.0, 2.0, 41), Axis("z", 0.05, 2.0, 40), 0.0, Quantity.FORCE),
               _iso(), aliases=("halfplane-iso",)),
        Recipe("fig4", "disc (d=1) on n=1.5 substrate, isotropic atom, force directions",
               DiscGeometry(1.0, 1.5),
               GridSpec(Axis("y", -1.0, 1.0, 41), Axis("z", 0.02, 0.8, 40), 0.0, Quantity.FORCE),
               _iso(True), aliases=("disc-substrate-iso",)),
        Recipe("fig5", "bare disc (d=1, n=1), z-polarized atom, force directions",
               DiscGeometry(1.0, 1.0),
               GridSpec(Axis("y", -1.0, 1.0, 41), Axis("z", 0.02, 0.8, 40), 0.0, Quantity.FORCE),
               DipoleVariance.cylindrical(0.0, 0.0, 1.0), aliases=("disc-z-polarized",)),
        Recipe("fig6", "potential of a unit charge above a disc (d=1) on n=2 substrate",
               DiscGeometry(1.0, 2.0),
               GridSpec(Axis("y", -1.5, 1.5, 61), Axis("z", 0.0, 1.5, 31), 0.0, Quantity.POTENTIAL),
               source=(0.0, 0.3, 0.5), aliases=("disc-potential",)),
        Recipe("fig8", "conducting bowl (d=1), isotropic atom, force directions",
               BowlGeometry(1.0),
               GridSpec(Axis("x", -1.0, 1.0, 41), Axis("z", -1.0, 1.0, 41), 0.0, Quantity.FORCE),
               _iso(), aliases=("bowl-iso",)),
    )
}


def get_recipe(name: str) -> Recipe:
    for r in RECIPES.values():
        if name == r.name or name in r.aliases:
            return r
    raise ConfigurationError(f"unknown recipe {name!r}; known: {', '.join(RECIPES)}")


def normal_force_sign_changes(records: Sequence[FieldRecord], spec: GridSpec,
                              normal_index: int = 2) -> list[tuple[float, float, float]]:
    """Sign changes of the force component ``normal_index`` along axis1 rows.

    Returns (axis2 value, axis1 left, axis1 right) for every change between
    neighbouring ok records at fixed axis2.
    """
    n1, n2 = spec.axis1.count, spec.axis2.count
    grid = [records[i * n2:(i + 1) * n2] for i in range(n1)]
    changes = []
    for j in range(n2):
        prev = None
        for i in range(n1):
            rec = grid[i][j]
            if rec.status is not Status.OK:
                prev = None
                continue
            if prev is not None and (prev.values[normal_index] > 0.0) != (rec.values[normal_index] > 0.0):
                changes.append((rec.c2, prev.c1, rec.c1))
            prev = rec
    return changes
