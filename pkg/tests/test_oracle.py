import ast
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import planarsio.oracle as oracle_module
from planarsio.domain_ops import kerzman_stein_P
from planarsio.domains import BoundaryTrace, boundary_grid
from planarsio.grid import Field, GridSpec, make_field
from planarsio.oracle import (
    OracleError,
    annulus_tbar_inv_z,
    chi_disc_S,
    chi_disc_T,
    circle_fourier_apply,
    direct_pv,
    disc_bergman_poly,
    disc_polar_integral,
    disc_S_poly,
    disc_T_poly,
    grid_probe,
    poly_conj,
    poly_dz,
    poly_dzbar,
    poly_eval,
    poly_mul,
)


@pytest.fixture(scope="module")
def spec():
    return GridSpec(256, 1.25)


def test_direct_pv_examples(spec, disc):
    zero = Field.zeros(spec)
    assert direct_pv(zero, disc, "inv_square", [0]) == [0]
    one = make_field(spec, lambda z: 0 * z + 1)
    assert abs(direct_pv(one, disc, "inv_square", [0])[0]) <= 1e-3
    p = grid_probe(spec, 0.5j)
    assert abs(direct_pv(one, disc, "inv_linear", [p])[0] + 0.5j) <= 1e-2


def test_direct_pv_rejects_off_grid_and_kernel(spec, disc):
    one = make_field(spec, lambda z: 0 * z + 1)
    with pytest.raises(OracleError):
        direct_pv(one, disc, "inv_square", [0.5j + 1e-3])
    with pytest.raises(OracleError):
        direct_pv(one, disc, "inv_cube", [0])


def test_circle_fourier_examples(disc):
    bg = boundary_grid(disc, 64)
    e = bg.sample(lambda t: t)
    assert np.abs(circle_fourier_apply(e, "K", disc).values[0] - bg.gamma).max() <= 1e-14
    assert np.abs(circle_fourier_apply(e, "P", disc).values[0]).max() <= 1e-14
    one = bg.sample(lambda t: 0 * t + 1)
    assert np.abs(circle_fourier_apply(one, "P").values[0] - 1).max() <= 1e-14
    em = bg.sample(np.conj)
    assert np.abs(circle_fourier_apply(em, "K").values[0]).max() <= 1e-14


def test_circle_fourier_errors(disc, ellipse):
    bg = boundary_grid(disc, 16)
    tr = bg.sample(lambda t: t)
    with pytest.raises(OracleError):
        circle_fourier_apply(tr, "K", ellipse)
    with pytest.raises(OracleError):
        circle_fourier_apply(tr, "Q")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=9, max_size=9))
def test_circle_P_matches_kerzman_stein(coeffs):
    from planarsio.domains import DomainSpec

    disc = DomainSpec.disc()
    bg = boundary_grid(disc, 64)
    t = bg.gamma
    vals = sum(c * t ** (k - 4) for k, c in enumerate(coeffs))
    tr = BoundaryTrace((vals,))
    a = circle_fourier_apply(tr, "P", disc).values[0]
    b = kerzman_stein_P(tr, bg).values[0]
    assert np.abs(a - b).max() <= 1e-10 * max(1.0, np.abs(vals).max())


@pytest.mark.parametrize(
    "tag, value",
    [("1", np.pi), ("|t|^2", np.pi / 2), ("|t|^4", np.pi / 3), ("t^1 tbar^2", 0), ("t^3 tbar^3", np.pi / 4)],
)
def test_disc_polar_integral(tag, value):
    assert disc_polar_integral(tag) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("tag", ["|t|^3", "sin(t)", "|t|^x"])
def test_disc_polar_integral_rejects(tag):
    with pytest.raises(OracleError):
        disc_polar_integral(tag)


def test_polar_integral_matches_quadrature(spec, disc):
    from planarsio.domains import mask_field

    w = mask_field(disc, spec).values.real * spec.h**2
    z = spec.z
    assert abs(np.sum(w * np.abs(z) ** 4) - disc_polar_integral("|t|^4")) <= 1e-4


def test_polynomial_algebra():
    p = {(2, 1): 1.5, (0, 3): -1j}
    q = {(1, 0): 2.0}
    assert poly_dz(p) == {(1, 1): 3.0}
    assert poly_dzbar(p) == {(2, 0): 1.5, (0, 2): -3j}
    assert poly_mul(p, q) == {(3, 1): 3.0, (1, 3): -2j}
    assert poly_conj(p) == {(1, 2): 1.5, (3, 0): 1j}
    z = np.array([0.3 + 0.2j, -0.5j])
    assert np.allclose(poly_eval(p, z), 1.5 * z**2 * np.conj(z) - 1j * np.conj(z) ** 3)


@settings(max_examples=50, deadline=None)
@given(a=st.integers(0, 6), b=st.integers(0, 6))
def test_disc_transforms_of_monomials(a, b):
    mono = {(a, b): 1.0}
    t = disc_T_poly(mono)
    # dbar T = I and d T = S
    assert poly_dzbar(t) == mono
    assert disc_S_poly(mono) == poly_dz(t)
    # T u is continuous across the circle: on |z| = 1 it equals the exterior value,
    # the Cauchy-type integral z^(a-b-1)/(b+1) that decays at infinity, or 0
    th = np.linspace(0, 2 * np.pi, 13)
    zc = np.exp(1j * th)
    outer = zc ** (a - b - 1) / (b + 1) if a < b + 1 else 0 * zc
    assert np.allclose(poly_eval(t, zc), outer, atol=1e-12)


def test_disc_bergman_of_monomials():
    assert disc_bergman_poly({(0, 0): 1.0}) == {(0, 0): 1.0}
    assert disc_bergman_poly({(0, 1): 1.0}) == {}
    assert disc_bergman_poly({(1, 1): 1.0}) == {(0, 0): 0.5}
    assert disc_bergman_poly({(3, 1): 1.0}) == {(2, 0): 0.75}


def test_closed_forms():
    assert chi_disc_T(0.5j) == -0.5j
    assert chi_disc_T(2) == 0.5
    assert chi_disc_S(0.3) == 0
    assert chi_disc_S(2) == -0.25
    assert annulus_tbar_inv_z(np.e) == pytest.approx(2.0)


def test_grid_probe_snaps(spec):
    p = grid_probe(spec, 0.5j + 0.001)
    j, k = spec.index_of(p)
    assert spec.z[j, k] == p


def test_oracles_do_not_use_transform_code():
    src = pathlib.Path(oracle_module.__file__).read_text()
    imported = set()
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module)
    assert not imported & {"plane_ops", "domain_ops", "disc_ops", "bergman", "_cauchy"}
