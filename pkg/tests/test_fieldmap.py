import io
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_patch.core import (
    BowlGeometry,
    ConfigurationError,
    DipoleVariance,
    DiscGeometry,
    HalfPlaneGeometry,
)
from casimir_patch.fieldmap import (
    RECIPES,
    Axis,
    FieldRecord,
    GridSpec,
    Quantity,
    Status,
    get_recipe,
    map_params,
    normal_force_sign_changes,
    read_csv,
    render_text,
    sample_grid,
)
from casimir_patch.shifts import closed_form_xi

FIXTURES = Path(__file__).parent / "fixtures"
ISO_CYL = DipoleVariance.cylindrical(1, 1, 1)


def small_spec(quantity=Quantity.SHIFT_ISO):
    return GridSpec(Axis("y", 0.1, 0.3, 2), Axis("z", 0.2, 0.4, 2), 0.0, quantity)


def test_axis_parse_and_validation():
    a = Axis.parse("z:0.02:0.8:40")
    assert (a.name, a.min, a.max, a.count) == ("z", 0.02, 0.8, 40)
    assert str(a) == "z:0.02:0.8:40"
    for bad in ("q:0:1:3", "z:1:0:3", "z:0:1:1", "z:0:1", "z:a:1:3"):
        with pytest.raises(ConfigurationError):
            Axis.parse(bad)
    with pytest.raises(ConfigurationError):
        GridSpec(Axis("z", 0, 1, 2), Axis("z", 0, 1, 2))
    with pytest.raises(ConfigurationError):
        GridSpec(Axis("y", 0, 1, 2), Axis("z", 0, 1, 2), quantity="energy")


def test_non_ok_records_carry_no_values():
    with pytest.raises(ValueError):
        FieldRecord(0.0, 0.0, (1.0,), Status.DIVERGED)


def test_row_major_order_and_values_match_library():
    geom = DiscGeometry(1.0, 1.5)
    spec = GridSpec(Axis("y", 0.1, 0.3, 3), Axis("z", 0.2, 0.4, 2), 0.05, Quantity.SHIFT_ISO)
    recs = sample_grid(geom, spec, ISO_CYL)
    assert len(recs) == 6
    coords = [(r.c1, r.c2) for r in recs]
    assert coords == [(y, z) for y in spec.axis1.values for z in spec.axis2.values]
    for r in recs:
        assert r.values[0] == closed_form_xi(geom, (0.05, r.c1, r.c2), ISO_CYL).delta_e


def test_missing_inputs_are_configuration_errors():
    with pytest.raises(ConfigurationError):
        sample_grid(DiscGeometry(1.0, 1.5), small_spec())
    with pytest.raises(ConfigurationError):
        sample_grid(DiscGeometry(1.0, 1.5), small_spec(Quantity.POTENTIAL))
    with pytest.raises(ConfigurationError):
        sample_grid(DiscGeometry(1.0, 1.5), small_spec(Quantity.POTENTIAL), source=(0, 0, -0.2))


def test_grid_entirely_on_conductor_is_all_diverged():
    spec = GridSpec(Axis("x", -0.2, 0.2, 2), Axis("y", -0.2, 0.2, 2), 0.0, Quantity.SHIFT_ISO)
    recs = sample_grid(DiscGeometry(1.0, 1.5), spec, ISO_CYL)
    assert len(recs) == 4
    assert all(r.status is Status.DIVERGED and r.values == () for r in recs)
    text = render_text(recs, map_params(DiscGeometry(1.0, 1.5), spec, ISO_CYL))
    assert text.splitlines()[-1] == "0.2,0.2,,diverged"


def test_statuses_for_each_geometry():
    spec = GridSpec(Axis("y", -1.0, 1.0, 3), Axis("z", -0.5, 0.5, 3), 0.0, Quantity.SHIFT_ISO)
    hp = {(r.c1, r.c2): r.status for r in sample_grid(HalfPlaneGeometry(1.5), spec,
                                                       DipoleVariance.cartesian(1, 1, 1))}
    assert hp[(1.0, 0.0)] is Status.DIVERGED
    assert hp[(0.0, -0.5)] is Status.IN_MATERIAL
    assert hp[(-1.0, 0.5)] is Status.OK
    assert hp[(-1.0, 0.0)] is Status.DIVERGED
    disc = {(r.c1, r.c2): r.status for r in sample_grid(DiscGeometry(1.0, 1.5), spec, ISO_CYL)}
    assert disc[(0.0, 0.0)] is Status.DIVERGED
    assert disc[(1.0, 0.0)] is Status.DIVERGED  # the atom touches the substrate
    assert disc[(1.0, -0.5)] is Status.IN_MATERIAL
    bare = {(r.c1, r.c2): r.status for r in sample_grid(DiscGeometry(1.0, 1.0), spec, ISO_CYL)}
    assert bare[(1.0, -0.5)] is Status.OK
    # the shift formula needs z > 0 even where nothing diverges
    assert bare[(1.0, 0.0)] is Status.OUT_OF_DOMAIN
    bspec = GridSpec(Axis("x", -0.5, 0.5, 3), Axis("z", -0.5, 0.5, 3), 0.0, Quantity.SHIFT_ISO)
    bowl = {(r.c1, r.c2): r.status for r in sample_grid(BowlGeometry(1.0), bspec,
                                                         DipoleVariance.cartesian(1, 1, 1))}
    assert bowl[(0.0, -0.5)] is Status.DIVERGED
    assert bowl[(0.0, 0.0)] is Status.OK


def test_potential_at_source_is_flagged():
    spec = GridSpec(Axis("y", 0.0, 0.3, 2), Axis("z", 0.25, 0.5, 2), 0.0, Quantity.POTENTIAL)
    recs = sample_grid(DiscGeometry(1.0, 2.0), spec, source=(0.0, 0.3, 0.5))
    assert recs[-1].status is Status.DIVERGED
    assert all(r.status is Status.OK and r.values[0] > 0 for r in recs[:-1])


def test_potential_is_finite_on_the_substrate():
    spec = GridSpec(Axis("y", 0.8, 1.0, 2), Axis("z", 0.0, 0.2, 2), 0.0, Quantity.POTENTIAL)
    recs = sample_grid(DiscGeometry(1.0, 2.0), spec, source=(0.0, 0.3, 0.5))
    assert all(r.status is Status.OK for r in recs)


@settings(max_examples=15)
@given(st.floats(0.0, 1.2), st.floats(0.03, 1.0))
def test_bare_disc_shift_is_mirror_symmetric(y, z):
    spec = GridSpec(Axis("y", y, y + 0.1, 2), Axis("z", -z, z, 2), 0.1, Quantity.SHIFT_COMPONENTS)
    recs = sample_grid(DiscGeometry(1.0, 1.0), spec, DipoleVariance.cylindrical(0.3, 0.5, 0.7))
    for below, above in (recs[0:2], recs[2:4]):
        for a, b in zip(below.values, above.values):
            assert abs(a - b) <= 1e-10 * abs(b)


def test_bare_disc_force_flips_normal_component():
    spec = GridSpec(Axis("y", 0.45, 0.55, 2), Axis("z", -0.1, 0.1, 2), 0.0, Quantity.FORCE)
    recs = sample_grid(DiscGeometry(1.0, 1.0), spec, DipoleVariance.cylindrical(0, 0, 1))
    for below, above in (recs[0:2], recs[2:4]):
        assert below.values[1] == pytest.approx(above.values[1], rel=1e-10)
        assert below.values[2] == pytest.approx(-above.values[2], rel=1e-10)


def test_csv_round_trip_and_determinism():
    geom = DiscGeometry(1.0, 1.5)
    spec = small_spec(Quantity.SHIFT_COMPONENTS)
    params = map_params(geom, spec, ISO_CYL)
    first = render_text(sample_grid(geom, spec, ISO_CYL), params)
    second = render_text(sample_grid(geom, spec, ISO_CYL), params)
    assert first == second
    head, recs = read_csv(first)
    assert head["schema"] == "1" and head["columns"] == "y,z,dE_rho,dE_phi,dE_z,status"
    assert render_text(recs, params) == first


def test_json_layout():
    geom = DiscGeometry(1.0, 1.5)
    spec = small_spec()
    recs = sample_grid(geom, spec, ISO_CYL)
    doc = json.loads(render_text(recs, map_params(geom, spec, ISO_CYL), "json"))
    assert doc["schema"] == 1 and doc["params"]["schema"] == 1
    assert len(doc["records"]) == 4
    assert doc["records"][0]["status"] == "ok"
    assert doc["records"][0]["values"][0] == pytest.approx(recs[0].values[0], rel=1e-14)


def test_golden_fixture():
    geom = DiscGeometry(1.0, 1.5)
    spec = small_spec()
    text = render_text(sample_grid(geom, spec, DipoleVariance.cylindrical(1, 1, 1)),
                       map_params(geom, spec, DipoleVariance.cylindrical(1, 1, 1)))
    assert text == (FIXTURES / "disc_2x2_shift_iso.csv").read_text()


def test_parallel_rows_match_serial():
    r = get_recipe("fig6")
    spec = GridSpec(Axis("y", -1.0, 1.0, 6), Axis("z", 0.0, 1.0, 5), 0.0, Quantity.POTENTIAL)
    serial = sample_grid(r.geometry, spec, source=r.source)
    parallel = sample_grid(r.geometry, spec, source=r.source, workers=2)
    assert serial == parallel


def test_recipes_and_aliases():
    assert set(RECIPES) == {"fig2", "fig4", "fig5", "fig6", "fig8"}
    assert get_recipe("disc-z-polarized") is RECIPES["fig5"]
    assert RECIPES["fig2"].geometry.n == 1.5 and RECIPES["fig4"].geometry.n == 1.5
    assert RECIPES["fig6"].geometry.n == 2.0
    with pytest.raises(ConfigurationError):
        get_recipe("fig3")


def test_z_polarized_bare_disc_force_changes_sign_near_edge():
    r = get_recipe("fig5")
    spec = GridSpec(Axis("y", 0.3, 0.8, 26), Axis("z", 0.05, 0.2, 4), 0.0, Quantity.FORCE)
    recs = sample_grid(r.geometry, spec, r.mu)
    changes = normal_force_sign_changes(recs, spec)
    assert len(changes) == 4
    # the boundary of the outward region leaves the rim and drifts out with height
    assert 0.5 < changes[0][2] and changes[0][1] < 0.6
    lefts = [left for _, left, _ in changes]
    assert lefts == sorted(lefts)


def test_sign_change_detection_on_synthetic_rows():
    spec = GridSpec(Axis("y", 0, 1, 3), Axis("z", 0, 1, 2), 0.0, Quantity.FORCE)
    vals = [(0, 0, -1), (0, 0, -1), (0, 0, 2), (0, 0, -1), (0, 0, 0), (0, 0, 0)]
    recs = [FieldRecord(c1, c2, v) for (c1, c2), v in
            zip([(a, b) for a in (0, 0.5, 1) for b in (0, 1)], vals)]
    recs[4] = FieldRecord(1.0, 0.0, (), Status.DIVERGED)
    assert normal_force_sign_changes(recs, spec) == [(0.0, 0.0, 0.5)]
