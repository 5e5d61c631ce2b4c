import numpy as np
import pytest

from planarsio.grid import GridSpec, write_cfld
from planarsio.samplers import Bump, TagError, bump, field_from_tag, parse_tag, polynomial_bump, random_compact


def test_bump_values():
    assert bump(0) == 1
    assert bump(0.9) == 0 and bump(1.5) == 0
    assert 0 < bump(0.5) < 1
    b = Bump(2.0, 1 + 1j)
    assert b(1 + 1j) == 1


def test_bump_derivatives_match_differences():
    b = Bump(0.9, 0.1j)
    z = np.array([0.2 + 0.1j, -0.3 + 0.4j, 0.5])
    d = 1e-5
    fx = (b(z + d) - b(z - d)) / (2 * d)
    fy = (b(z + 1j * d) - b(z - 1j * d)) / (2 * d)
    assert np.allclose(b.dz(z), 0.5 * (fx - 1j * fy), atol=1e-8)
    assert np.allclose(b.dzbar(z), 0.5 * (fx + 1j * fy), atol=1e-8)


def test_polynomial_bump():
    assert polynomial_bump(0) == 1
    assert polynomial_bump(0.5, 2) == pytest.approx(0.5625)
    assert polynomial_bump(1.2) == 0


@pytest.mark.parametrize(
    "tag, z, value",
    [
        ("zero", 0.3j, 0),
        ("one", 0.3j, 1),
        ("z", 0.3 + 0.1j, 0.3 + 0.1j),
        ("zbar", 0.3 + 0.1j, 0.3 - 0.1j),
        ("z2", 2j, -4),
        ("inv_z", 2j, -0.5j),
        ("inv_z", 0, 0),
        ("bump*0.5", 0, 0.5),
        ("z * 2i", 1, 2j),
        ("const:0.3+0.1i", 5, 0.3 + 0.1j),
    ],
)
def test_parse_tag(tag, z, value):
    assert parse_tag(tag)(np.array([z]))[0] == pytest.approx(value)


@pytest.mark.parametrize("tag", ["sinz", "z*x", "const:abc"])
def test_parse_tag_rejects(tag):
    with pytest.raises(TagError):
        parse_tag(tag)


def test_field_from_tag(tmp_path):
    spec = GridSpec(16, 1.0)
    assert np.all(field_from_tag(2.5, spec).values == 2.5)
    u = field_from_tag("z", spec)
    assert np.array_equal(u.values, spec.z.astype(complex))
    write_cfld(tmp_path / "u.cfld", u)
    v = field_from_tag("u.cfld", spec, base_dir=tmp_path)
    assert v.values.tobytes() == u.values.tobytes()
    with pytest.raises(TagError):
        field_from_tag("u.cfld", GridSpec(32, 1.0), base_dir=tmp_path)
    with pytest.raises(TagError):
        field_from_tag([1, 2], spec)


def test_random_compact_is_seeded_and_supported():
    spec = GridSpec(32, 2.0)
    a = random_compact(spec, seed=5, radius=1.0)
    b = random_compact(spec, seed=5, radius=1.0)
    assert a.values.tobytes() == b.values.tobytes()
    assert np.all(a.values[np.abs(spec.z) >= 1] == 0)
    c = random_compact(spec, seed=6, radius=1.0, zero_mean=True)
    assert abs(c.values[np.abs(spec.z) < 1].mean()) <= 1e-14
