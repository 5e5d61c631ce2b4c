import numpy as np
import pytest

from planarsio.domains import DomainSpec
from planarsio.grid import GridSpec


@pytest.fixture(scope="session")
def disc():
    return DomainSpec.disc()


@pytest.fixture(scope="session")
def ellipse():
    return DomainSpec.ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def annulus():
    return DomainSpec.annulus(0.5)


@pytest.fixture(scope="session")
def plane256():
    return GridSpec(256, 4.0)


@pytest.fixture(scope="session")
def disc256():
    return GridSpec(256, 1.25)


def rel_l2(u, v, weight=None):
    u = np.asarray(u)
    v = np.asarray(v)
    w = 1.0 if weight is None else weight
    return float(np.sqrt(np.sum(w * np.abs(u - v) ** 2) / np.sum(w * np.abs(v) ** 2)))


def random_smooth(spec, seed, radius=0.95, degree=3):
    """Seeded random polynomial in z, zbar times a C-infinity bump of the given radius."""
    from planarsio.grid import Field
    from planarsio.samplers import Bump

    rng = np.random.default_rng(seed)
    z = spec.z
    poly = np.zeros(z.shape, complex)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            poly += c * z**a * np.conj(z) ** b
    return Field(spec, poly * Bump(radius)(z))
