import numpy as np
import pytest

from planarsio.domain_ops import (
    cauchy_K,
    cauchy_extension,
    kerzman_stein_P,
    pompeiu_residual,
    s_omega,
    s_omega_bar,
    t_omega,
    t_omega_bar,
)
from planarsio.domains import BoundaryTrace, boundary_grid, mask_field, support
from planarsio.grid import Field, GridSpec, make_field
from planarsio.oracle import (
    annulus_tbar_inv_z,
    circle_fourier_apply,
    direct_pv,
    disc_bergman_poly,
    disc_T_poly,
    poly_conj,
    poly_eval,
)
from planarsio.plane_ops import beurling, cauchy_green
from planarsio.samplers import Bump, random_compact


@pytest.fixture(scope="module")
def spec():
    return GridSpec(256, 1.25)


def interior(domain, spec, depth=0.0):
    m = mask_field(domain, spec).values.real == 1
    if depth:
        from planarsio.domains import signed_distance

        m &= signed_distance(domain, spec.z) > depth
    return m


@pytest.mark.parametrize("op", [s_omega, t_omega, s_omega_bar, t_omega_bar])
def test_zero_maps_to_zero(op, disc):
    assert np.all(op(Field.zeros(GridSpec(64, 1.25)), disc).values == 0)


@pytest.mark.parametrize("backend", ["convolution", "multiplier"])
def test_literal_mode_is_masked_whole_plane(backend, ellipse):
    spec = GridSpec(64, 2.5)
    u = random_compact(spec, seed=21, radius=2.2)
    mask = mask_field(ellipse, spec)
    got = s_omega(u, ellipse, backend, correction=0).values
    assert got.tobytes() == (mask * beurling(mask * u, backend)).values.tobytes()
    got = t_omega(u, ellipse, correction=0).values
    assert got.tobytes() == (mask * cauchy_green(mask * u, "convolution")).values.tobytes()


def test_s_omega_of_one_on_disc(disc, spec):
    su = s_omega(make_field(spec, lambda z: 0 * z + 1), disc).values
    assert np.abs(su[interior(disc, spec)]).max() <= 1e-2


def test_t_omega_of_one_on_disc(disc, spec):
    tu = t_omega(make_field(spec, lambda z: 0 * z + 1), disc).values
    sel = interior(disc, spec)
    assert np.abs(tu - np.conj(spec.z))[sel].max() <= 1e-2


def test_t_omega_rejects_multiplier(disc):
    with pytest.raises(ValueError):
        t_omega(Field.zeros(GridSpec(32, 1.25)), disc, "multiplier")


def test_s_omega_matches_direct_quadrature(ellipse):
    spec = GridSpec(256, 2.25)
    u = make_field(spec, lambda z: np.exp(z) + np.conj(z) ** 2)
    su = s_omega(u, ellipse)
    probes = [spec.z[spec.index_of(p)] for p in (0, 0.5, -1.0j * 0.5, 1 + 0.3j, -1.2 - 0.2j, 0.3 + 0.6j, -0.4 + 0.4j, 1.5, -0.8j)]
    ref = np.array(direct_pv(u, ellipse, "inv_square", probes))
    got = np.array([su.values[spec.index_of(p)] for p in probes])
    assert np.abs(got - ref).max() <= 3e-2 * np.abs(ref).max()


def test_annulus_tbar_of_inverse_z(annulus):
    spec = GridSpec(256, 1.1)
    u = make_field(spec, lambda z: 1 / np.where(z == 0, 1, z))
    tb = t_omega_bar(u, annulus).values
    sel = interior(annulus, spec)
    assert np.abs(tb - annulus_tbar_inv_z(spec.z))[sel].max() <= 1e-2


def test_cauchy_K_examples(disc):
    bg = boundary_grid(disc, 256)
    assert abs(cauchy_K(bg.sample(lambda t: 0 * t + 1), bg, [0])[0] - 1) <= 1e-12
    z = 0.3 + 0.1j
    assert abs(cauchy_K(bg.sample(lambda t: t**2), bg, [z])[0] - z**2) <= 1e-10
    assert abs(cauchy_K(bg.sample(np.conj), bg, [0])[0]) <= 1e-12


def test_cauchy_K_reproduces_polynomials(ellipse):
    bg = boundary_grid(ellipse, 256)
    pts = np.array([0, 0.5 + 0.3j, -1.2 + 0.2j, 1.6, -0.6j])
    for deg in (1, 7, 32, 64):
        vals = cauchy_K(bg.sample(lambda t: (t / 2) ** deg), bg, pts)
        assert np.abs(vals - (pts / 2) ** deg).max() <= 1e-10


def test_cauchy_K_flags_targets_near_boundary(disc):
    bg = boundary_grid(disc, 64)
    vals = cauchy_K(bg.sample(lambda t: t), bg, [0.0, 0.99, 1.5])
    assert np.isfinite(vals[0]) and np.isnan(vals[1]) and np.isnan(vals[2])


def test_cauchy_extension_with_derivative(ellipse):
    spec = GridSpec(128, 2.25)
    bg = boundary_grid(ellipse, 256)
    f, df = cauchy_extension(bg.sample(lambda t: t**3 - 2 * t), bg, spec, derivative=True)
    sel = support(ellipse, spec)
    z = spec.z[sel]
    assert np.abs(f.values[sel] - (z**3 - 2 * z)).max() <= 1e-8
    assert np.abs(df.values[sel] - (3 * z**2 - 2)).max() <= 1e-7


def test_bergman_as_derivative_of_cauchy_of_tbar(disc):
    # B u = d K (Tbar u) on the disc, with the trace of Tbar u from the polynomial oracle
    poly = {(2, 1): 1.0, (1, 0): 0.5 - 0.2j, (0, 2): 0.3, (3, 3): -0.4j}
    tbar = poly_conj(disc_T_poly(poly_conj(poly)))
    spec = GridSpec(128, 1.25)
    bg = boundary_grid(disc, 256)
    _, dk = cauchy_extension(bg.sample(lambda t: poly_eval(tbar, t)), bg, spec, derivative=True)
    sel = interior(disc, spec, 0.05)
    ref = poly_eval(disc_bergman_poly(poly), spec.z)
    assert np.linalg.norm((dk.values - ref)[sel]) <= 5e-2 * np.linalg.norm(ref[sel])


def test_pompeiu_zero(disc):
    spec = GridSpec(64, 1.25)
    assert pompeiu_residual(Field.zeros(spec), disc, boundary_grid(disc, 128), [0, 0.5]) == 0


@pytest.mark.parametrize("name", ["holomorphic", "zbar_bump"])
def test_pompeiu_identity(disc, spec, name):
    fn = {"holomorphic": lambda z: z**3 - 2 * z + 1, "zbar_bump": lambda z: np.conj(z) * Bump(0.9)(z)}[name]
    u = make_field(spec, fn)
    probes = [0, 0.5, 0.3j, -0.6 + 0.2j, -0.2 - 0.7j]
    assert pompeiu_residual(u, disc, boundary_grid(disc, 256), probes) <= 2e-2


def test_P_on_circle(disc):
    bg = boundary_grid(disc, 128)
    one = kerzman_stein_P(bg.sample(lambda t: 0 * t + 1), bg).values[0]
    assert np.abs(one - 1).max() <= 1e-12
    e = kerzman_stein_P(bg.sample(lambda t: t), bg).values[0]
    assert np.abs(e).max() <= 1e-12


def test_P_matches_fourier_oracle_on_circle(disc):
    bg = boundary_grid(disc, 128)
    tr = bg.sample(lambda t: 0.3 + t**3 - 2j * np.conj(t) ** 5 + np.conj(t) * 0.1)
    got = kerzman_stein_P(tr, bg).values[0]
    ref = circle_fourier_apply(tr, "P", disc).values[0]
    assert np.abs(got - ref).max() <= 1e-10


def test_P_smooths_sawtooth_on_ellipse(ellipse):
    m = 256
    bg = boundary_grid(ellipse, m)
    saw = ((bg.theta / np.pi) % 2) - 1
    pu = kerzman_stein_P(BoundaryTrace((saw,)), bg).values[0]
    cu, cp = np.abs(np.fft.fft(saw)) / m, np.abs(np.fft.fft(pu)) / m
    assert cp[32] <= 1e-2 * cu[32]


def test_P_diagonal_is_the_limit(ellipse):
    comp = boundary_grid(ellipse, 16).components[0]
    diag = np.imag(comp.d2gamma / (2 * comp.dgamma))
    gaps = []
    for d in (1e-2, 5e-3):
        th = comp.theta + d
        g = 2 * np.cos(th) + 1j * np.sin(th)
        dg = -2 * np.sin(th) + 1j * np.cos(th)
        gaps.append(np.abs(np.imag(dg / (g - comp.gamma)) - diag).max())
    assert gaps[1] == pytest.approx(gaps[0] / 2, rel=0.05)


def test_P_rejects_annulus(annulus):
    bg = boundary_grid(annulus, 32)
    with pytest.raises(ValueError):
        kerzman_stein_P(bg.sample(lambda t: t), bg)
