import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarsio.grid import (
    Field,
    GridSpec,
    delta,
    holder_quotient,
    inner,
    make_field,
    norms,
    read_cfld,
    shift,
    spectral_derivative,
    write_cfld,
)
from planarsio.samplers import Bump, random_compact


def test_gridspec_spacing_is_exact():
    spec = GridSpec(256, 4.0)
    assert spec.h == 2 * 4.0 / 256


@pytest.mark.parametrize("n, l", [(7, 1.0), (6, 1.0), (8, 0.0), (8, -1.0)])
def test_gridspec_rejects_bad_parameters(n, l):
    with pytest.raises(ValueError):
        GridSpec(n, l)


def test_make_field_zero():
    u = make_field(GridSpec(16, 1.0), lambda z: 0 * z)
    assert np.all(u.values == 0)


def test_make_field_grid_convention():
    u = make_field(GridSpec(8, 1.0), lambda z: z)
    assert u.values[0, 0] == -1 - 1j
    assert u.values[0, 1] == -0.75 - 1j
    assert u.values[1, 0] == -1 - 0.75j


def test_make_field_gaussian_peak():
    spec = GridSpec(256, 4.0)
    u = make_field(spec, lambda z: np.exp(-np.abs(z) ** 2))
    j, k = np.unravel_index(np.argmax(np.abs(u.values)), u.values.shape)
    assert (j, k) == spec.index_of(0)
    assert u.values[j, k] == 1


def test_make_field_rejects_non_finite_with_index():
    with pytest.raises(ValueError, match="index"):
        make_field(GridSpec(8, 1.0), lambda z: 1 / (z - z[2, 3]))


def test_field_is_immutable():
    u = Field.zeros(GridSpec(8, 1.0))
    with pytest.raises(ValueError):
        u.values[0, 0] = 1


def test_shift_identity_and_group_law():
    u = random_compact(GridSpec(32, 2.0), seed=1)
    assert np.array_equal(shift(u, 0, 0).values, u.values)
    assert np.array_equal(shift(shift(u, 1, 0), -1, 0).values, u.values)


def test_shift_of_z_adds_h_except_wrap():
    spec = GridSpec(16, 1.0)
    u = make_field(spec, lambda z: z)
    s = shift(u, 1, 0).values - u.values
    assert np.allclose(s[:, :-1], spec.h, atol=1e-15)
    assert np.allclose(s[:, -1], -2 * spec.l + spec.h)


def test_delta_cases():
    spec = GridSpec(16, 1.0)
    c = make_field(spec, lambda z: 0 * z + 3 - 2j)
    assert np.all(delta(c, 2, -1).values == 0)
    u = random_compact(spec, seed=2)
    assert np.all(delta(u, 0, 0).values == 0)
    d = delta(make_field(spec, lambda z: z), 1, 0).values
    assert np.allclose(d[:, :-1], spec.h, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(p=st.integers(-40, 40), q=st.integers(-40, 40))
def test_shift_preserves_norms(p, q):
    u = random_compact(GridSpec(32, 2.0), seed=3)
    assert norms(shift(u, p, q), None) == pytest.approx(norms(u), rel=1e-12)


def test_norms_cases(disc):
    assert norms(Field.zeros(GridSpec(8, 1.0))) == (0.0, 0.0)
    for n in (8, 64):
        l2, linf = norms(make_field(GridSpec(n, 1.0), lambda z: 0 * z + 1))
        assert l2 == pytest.approx(2.0, abs=1e-14)
        assert linf == 1.0
    from planarsio.domains import mask_field

    spec = GridSpec(256, 2.0)
    l2, _ = norms(make_field(spec, lambda z: 0 * z + 1), mask_field(disc, spec))
    assert abs(l2 - np.sqrt(np.pi)) <= 1e-2


def test_norms_mask_shape_mismatch():
    with pytest.raises(ValueError):
        norms(Field.zeros(GridSpec(8, 1.0)), np.ones((4, 4)))


def test_norms_grid_consistent():
    f = lambda z: np.exp(-np.abs(z) ** 2)  # noqa: E731
    a = norms(make_field(GridSpec(64, 4.0), f))[0]
    b = norms(make_field(GridSpec(128, 4.0), f))[0]
    assert abs(a - b) / b < (8 / 64) ** 2


def test_inner_is_hermitian():
    spec = GridSpec(32, 2.0)
    u, v = random_compact(spec, seed=4), random_compact(spec, seed=5)
    assert inner(u, v) == pytest.approx(np.conj(inner(v, u)), rel=1e-13)
    assert inner(u, u).real == pytest.approx(norms(u)[0] ** 2, rel=1e-13)


def test_spectral_derivative_constant():
    u = make_field(GridSpec(32, 1.0), lambda z: 0 * z + 1)
    assert np.abs(spectral_derivative(u, "dz").values).max() < 1e-14


def test_spectral_derivative_single_mode():
    l = 2.0
    spec = GridSpec(64, l)
    u = make_field(spec, lambda z: np.exp(1j * np.pi * (z.real + z.imag) / l))
    expected = (np.pi / (2 * l)) * (1 + 1j) * u.values
    assert np.abs(spectral_derivative(u, "dz").values - expected).max() < 1e-12
    assert np.abs(spectral_derivative(u, "dzbar").values - (np.pi / (2 * l)) * (1j - 1) * u.values).max() < 1e-12


def test_spectral_dzbar_product_rule():
    # the bump spans about 120 cells so its spectrum is resolved at n=256
    spec = GridSpec(256, 2.0)
    b = Bump(1.9)
    z = spec.z
    u = make_field(spec, lambda z: np.conj(z) * b(z))
    expected = b(z) + np.conj(z) * b.dzbar(z)
    assert np.abs(spectral_derivative(u, "dzbar").values - expected).max() <= 1e-6
    v = make_field(spec, lambda z: z * b(z))
    assert np.abs(spectral_derivative(v, "dzbar").values - z * b.dzbar(z)).max() <= 1e-6


def test_spectral_derivative_conjugation():
    u = random_compact(GridSpec(32, 2.0), seed=6, smooth=True)
    lhs = spectral_derivative(u.conj(), "dz").values
    rhs = np.conj(spectral_derivative(u, "dzbar").values)
    assert np.abs(lhs - rhs).max() < 1e-14


def test_spectral_derivative_rejects_unknown():
    with pytest.raises(ValueError):
        spectral_derivative(Field.zeros(GridSpec(8, 1.0)), "dx")


def test_holder_constant_is_zero():
    est = holder_quotient(make_field(GridSpec(32, 1.0), lambda z: 0 * z + 2), 0.5)
    assert all(q == 0 for q in est.quotients)
    assert est.sup_quotient == 0


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_holder_of_power(alpha):
    est = holder_quotient(make_field(GridSpec(128, 1.0), lambda z: np.abs(z) ** alpha), alpha)
    assert 1 - 1e-12 <= est.sup_quotient <= 2 ** (1 - alpha)
    assert est.sup_quotient == max(est.quotients)


def test_holder_of_white_noise_grows():
    u = random_compact(GridSpec(128, 2.0), seed=7, radius=1.5)
    est = holder_quotient(u, 0.5)
    assert est.quotients[0] > 2 * est.quotients[-1]


def test_holder_rejects_alpha():
    with pytest.raises(ValueError):
        holder_quotient(Field.zeros(GridSpec(8, 1.0)), 1.0)


def test_cfld_roundtrip_is_bit_exact(tmp_path):
    u = random_compact(GridSpec(32, 1.5), seed=8)
    path = tmp_path / "u.cfld"
    write_cfld(path, u)
    header = path.read_bytes().split(b"\n", 1)[0]
    assert b'"magic":"CFLD"' in header and b'"layout":"row-major-y-outer"' in header
    v = read_cfld(path)
    assert v.spec == u.spec
    assert v.values.tobytes() == u.values.tobytes()
    assert path.stat().st_size == len(header) + 1 + 16 * 32 * 32
