import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsio.domains import (
    BoundaryTrace,
    DomainSpec,
    boundary_grid,
    mask_field,
    read_cbnd,
    signed_distance,
    write_cbnd,
)
from planarsio.grid import GridSpec


def area(domain, spec):
    return float(mask_field(domain, spec).values.real.sum() * spec.h**2)


def test_disc_mask_area(disc):
    assert abs(area(disc, GridSpec(256, 2.0)) - np.pi) <= 1e-3


def test_annulus_mask_area(annulus):
    assert abs(area(annulus, GridSpec(256, 2.0)) - 0.75 * np.pi) <= 1e-3


def test_ellipse_mask_area(ellipse):
    assert abs(area(ellipse, GridSpec(256, 2.5)) - 2 * np.pi) <= 1e-3


def test_mask_values(disc):
    spec = GridSpec(64, 2.0)
    m = mask_field(disc, spec).values
    assert m[spec.index_of(0.1 + 0.2j)] == 1
    assert m[spec.index_of(1.8)] == 0
    assert np.all((m.real >= 0) & (m.real <= 1)) and np.all(m.imag == 0)


def test_mask_area_converges_at_second_order(ellipse):
    errs = [abs(area(ellipse, GridSpec(n, 2.5)) - 2 * np.pi) for n in (32, 64)]
    assert errs[1] <= errs[0] / 4 or errs[1] < 1e-6


def test_mask_rejects_domain_outside_square(disc):
    with pytest.raises(ValueError):
        mask_field(disc, GridSpec(64, 1.0))


def test_domain_invariants():
    with pytest.raises(ValueError):
        DomainSpec.annulus(1.0, 0.5)
    with pytest.raises(ValueError):
        DomainSpec.disc(radius=-1.0)
    with pytest.raises(ValueError):
        # clockwise circle
        DomainSpec.curve([1.0, 0, 0])


def test_unit_disc_boundary_grid_m4(disc):
    bg = boundary_grid(disc, 4)
    assert np.allclose(bg.gamma, [1, 1j, -1, -1j], atol=1e-15)
    assert np.allclose(bg.dgamma, [1j, -1, -1j, 1], atol=1e-15)


def test_ellipse_speed(ellipse):
    bg = boundary_grid(ellipse, 64)
    t = bg.theta
    assert np.allclose(np.abs(bg.dgamma) ** 2, 4 * np.sin(t) ** 2 + np.cos(t) ** 2, atol=1e-13)


def test_annulus_inner_is_clockwise(annulus):
    bg = boundary_grid(annulus, 64)
    assert len(bg.components) == 2
    outer, inner = bg.components
    # orientation from the sign of the enclosed signed area
    def signed_area(c):
        return 0.5 * np.sum((np.conj(c.gamma) * c.dgamma).imag) * 2 * np.pi / c.gamma.size

    assert signed_area(outer) > 0 > signed_area(inner)
    assert np.allclose(np.abs(inner.gamma), 0.5)


def test_boundary_grid_refinement_is_nested(ellipse):
    a, b = boundary_grid(ellipse, 64), boundary_grid(ellipse, 128)
    assert np.array_equal(a.gamma, b.gamma[::2])


def test_boundary_grid_rejects_non_power_of_two(disc):
    with pytest.raises(ValueError):
        boundary_grid(disc, 48)


@pytest.mark.parametrize("z, expected", [(0, 1.0), (0.9, 0.1), (1.5, -0.5)])
def test_disc_signed_distance(disc, z, expected):
    assert float(signed_distance(disc, z)) == pytest.approx(expected, abs=1e-12)


def test_ellipse_signed_distance(ellipse):
    assert float(signed_distance(ellipse, 0)) == pytest.approx(1.0, abs=1e-10)
    assert float(signed_distance(ellipse, 1.5)) == pytest.approx(0.5, abs=1e-10)


def test_annulus_signed_distance(annulus):
    assert float(signed_distance(annulus, 0.75)) == pytest.approx(0.25, abs=1e-12)
    assert float(signed_distance(annulus, 0.2j)) == pytest.approx(-0.3, abs=1e-12)


@pytest.mark.parametrize("kind", ["disc", "annulus", "ellipse"])
def test_boundary_nodes_have_zero_distance(kind, disc, annulus, ellipse):
    domain = {"disc": disc, "annulus": annulus, "ellipse": ellipse}[kind]
    for c in boundary_grid(domain, 64).components:
        assert np.abs(signed_distance(domain, c.gamma)).max() <= 1e-10


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0, 0.99), t=st.floats(0, 2 * np.pi))
def test_inside_matches_distance_sign(r, t):
    domain = DomainSpec.ellipse(2.0, 1.0)
    z = r * (2 * np.cos(t) + 1j * np.sin(t))
    assert bool(domain.inside(z)) == (float(signed_distance(domain, z)) > 0)


def test_json_roundtrip(disc, annulus, ellipse):
    for d in (disc, annulus, ellipse, DomainSpec.disc(0.1 + 0.2j, 0.5)):
        back = DomainSpec.from_json(d.to_json())
        assert back.to_json() == d.to_json()
        assert back.area == pytest.approx(d.area)
    assert DomainSpec.from_json({"kind": "ellipse", "a": 2, "b": 1}).area == pytest.approx(2 * np.pi, rel=1e-12)


def test_cbnd_roundtrip(tmp_path, annulus):
    bg = boundary_grid(annulus, 32)
    tr = bg.sample(lambda z: z**2 + 1j)
    write_cbnd(tmp_path / "t.cbnd", tr)
    back = read_cbnd(tmp_path / "t.cbnd")
    assert len(back.values) == 2
    for a, b in zip(tr.values, back.values):
        assert a.tobytes() == b.tobytes()


def test_trace_component_sizes_must_agree():
    with pytest.raises(ValueError):
        BoundaryTrace((np.zeros(4), np.zeros(8)))
