import pytest

from casimir_patch.core import BowlGeometry, DipoleVariance, DiscGeometry, HalfPlaneGeometry
from casimir_patch.fieldmap import Axis, GridSpec, Quantity, sample_grid
from casimir_patch.plotting import render_map

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
CART = DipoleVariance.cartesian(1, 1, 1)


@pytest.mark.parametrize("geometry, spec, mu, source", [
    (HalfPlaneGeometry(1.5), GridSpec(Axis("y", -1, 1, 5), Axis("z", 0.1, 1, 4)), CART, None),
    (DiscGeometry(1.0, 2.0), GridSpec(Axis("y", -1, 1, 6), Axis("z", 0, 1, 5), 0.0, Quantity.POTENTIAL),
     None, (0.0, 0.3, 0.5)),
    (DiscGeometry(1.0, 1.5), GridSpec(Axis("x", -1, 1, 5), Axis("z", 0.1, 1, 4), 0.2,
                                      Quantity.SHIFT_COMPONENTS), DipoleVariance.cylindrical(1, 1, 1), None),
    (BowlGeometry(1.0), GridSpec(Axis("x", -1, 1, 7), Axis("z", -1, 1, 7), 0.1, Quantity.SHIFT_ISO),
     CART, None),
    (BowlGeometry(1.0), GridSpec(Axis("x", -1, 1, 4), Axis("y", -1, 1, 4), 0.7), CART, None),
])
def test_render_writes_png(tmp_path, geometry, spec, mu, source):
    recs = sample_grid(geometry, spec, mu, source)
    path = tmp_path / "map.png"
    render_map(recs, spec, geometry, str(path), title="check")
    assert path.read_bytes()[:8] == PNG_MAGIC
