"""Render field maps to image files (Agg backend, no display needed)."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import BowlGeometry, Geometry, HalfPlaneGeometry  # noqa: E402
from .fieldmap import FieldRecord, GridSpec, Quantity, Status  # noqa: E402

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def _grid(records: Sequence[FieldRecord], spec: GridSpec, column: int) -> np.ndarray:
    vals = np.full((spec.axis1.count, spec.axis2.count), np.nan)
    for k, rec in enumerate(records):
        if rec.status is Status.OK:
            vals[divmod(k, spec.axis2.count)] = rec.values[column]
    return vals


def _outline(ax, geometry: Geometry, spec: GridSpec) -> None:
    """Draw the conductor where it meets the plotted plane."""
    a1, a2 = spec.axis1.name, spec.axis2.name
    style = dict(color="crimson", lw=2.5)
    if isinstance(geometry, BowlGeometry):
        r = 0.5 * geometry.d
        if spec.slice_axis == "z":
            return
        rr = r * r - spec.slice ** 2
        if rr <= 0:
            return
        t = np.linspace(np.pi, 2 * np.pi, 200)
        pts = {spec.slice_axis: np.full_like(t, spec.slice), "z": np.sqrt(rr) * np.sin(t)}
        horiz = next(a for a in (a1, a2) if a != "z")
        pts[horiz] = np.sqrt(rr) * np.cos(t)
        ax.plot(pts[a1], pts[a2], **style)
        return
    if "z" not in (a1, a2):
        return
    lateral = a1 if a2 == "z" else a2
    if isinstance(geometry, HalfPlaneGeometry):
        if lateral == "y":
            seg = ([0.0, spec.axis1.max if a1 == "y" else spec.axis2.max], [0.0, 0.0])
        else:
            seg = ([spec.axis1.min, spec.axis1.max] if a1 == "x" else [spec.axis2.min, spec.axis2.max],
                   [0.0, 0.0])
    else:
        half = 0.5 * geometry.d
        if abs(spec.slice) >= half:
            return
        w = float(np.sqrt(half * half - spec.slice ** 2))
        seg = ([-w, w], [0.0, 0.0])
    xs, zs = seg
    if a1 == "z":
        xs, zs = zs, xs
    ax.plot(xs, zs, **style)


def render_map(records: Sequence[FieldRecord], spec: GridSpec, geometry: Geometry,
               path: str, title: str = "") -> None:
    """Quiver plot of in-plane force directions, or contours for scalar maps."""
    c1, c2 = spec.axis1.values, spec.axis2.values
    X, Y = np.meshgrid(c1, c2, indexing="ij")
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    if spec.quantity is Quantity.FORCE:
        u = _grid(records, spec, _AXIS_INDEX[spec.axis1.name])
        v = _grid(records, spec, _AXIS_INDEX[spec.axis2.name])
        norm = np.hypot(u, v)
        norm[norm == 0] = np.nan
        ax.quiver(X, Y, u / norm, v / norm, color="tab:blue", angles="xy", pivot="mid")
    else:
        if spec.quantity is Quantity.SHIFT_COMPONENTS:
            vals = sum(_grid(records, spec, i) for i in range(3))
        else:
            vals = _grid(records, spec, 0)
        if spec.quantity is not Quantity.POTENTIAL:
            # energies span decades near the surface; contour the magnitude on a log scale
            vals = np.log10(np.abs(vals))
        finite = vals[np.isfinite(vals)]
        if finite.size > 1 and np.ptp(finite) > 0:
            # quantile levels keep the 1/r peak at a source from swallowing the rest
            levels = np.unique(np.quantile(finite, np.linspace(0.02, 0.98, 20)))
            cs = ax.contour(X, Y, np.ma.masked_invalid(vals), levels=levels, cmap="viridis")
            fig.colorbar(cs, ax=ax)
    _outline(ax, geometry, spec)
    ax.set_xlabel(spec.axis1.name)
    ax.set_ylabel(spec.axis2.name)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
