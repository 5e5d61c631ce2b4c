"""Closed-form test functions, expression tags and seeded random fields.

Tags are the small vocabulary used by configuration files:

    "zero", "one", "z", "zbar", "z2", "inv_z", "bump", "bump*0.5",
    "const:0.3+0.1i", "path/to/field.cfld"

A tag may carry a trailing ``*<number>`` factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Field, GridSpec, read_cfld

__all__ = ["Bump", "bump", "parse_tag", "field_from_tag", "random_compact", "polynomial_bump", "TagError"]


class TagError(ValueError):
    """Unknown or malformed expression tag."""


@dataclass(frozen=True)
class Bump:
    """``exp(1 - 1/(1 - |z - center|^2 / R^2))`` inside the disc of radius R, 0 outside.

    Equal to 1 at the centre, C-infinity, with closed-form Wirtinger derivatives.
    """

    radius: float = 0.9
    center: complex = 0j

    def _parts(self, z):
        z = np.asarray(z, complex)
        w = z - self.center
        s = np.abs(w) ** 2 / self.radius**2
        inside = s < 1
        val = np.zeros(z.shape)
        q = np.where(inside, 1 - s, 1.0)
        val[inside] = np.exp(1 - 1 / q[inside])
        # d(val)/ds = -val / (1 - s)^2
        dval = np.where(inside, -val / q**2, 0.0)
        return w, val, dval

    def __call__(self, z):
        return self._parts(z)[1]

    def dz(self, z):
        w, _, dval = self._parts(z)
        return dval * np.conj(w) / self.radius**2

    def dzbar(self, z):
        w, _, dval = self._parts(z)
        return dval * w / self.radius**2


bump = Bump()


def polynomial_bump(z, power: int = 2):
    """``(1 - |z|^2)^power`` on the unit disc, 0 outside."""
    z = np.asarray(z, complex)
    return np.where(np.abs(z) < 1, (1 - np.abs(z) ** 2) ** power, 0.0)


def _parse_number(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise TagError(f"bad number in tag: {text!r}") from None


_BASE = {
    "zero": lambda z: np.zeros(z.shape, complex),
    "one": lambda z: np.ones(z.shape, complex),
    "z": lambda z: z.astype(complex),
    "zbar": lambda z: np.conj(z),
    "z2": lambda z: z.astype(complex) ** 2,
    "bump": lambda z: bump(z).astype(complex),
}


def _inv_z(z):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(z == 0, 0, 1 / np.where(z == 0, 1, z))
    return out


_BASE["inv_z"] = _inv_z


def parse_tag(tag: str):
    """Sampler ``z -> values`` for a closed-form tag (not a file reference)."""
    tag = tag.strip()
    scale = 1.0 + 0j
    if tag.startswith("const:"):
        val = _parse_number(tag[len("const:"):])
        return lambda z: np.full(np.shape(z), val, complex)
    if "*" in tag:
        tag, _, factor = tag.partition("*")
        scale = _parse_number(factor)
        tag = tag.strip()
    if tag not in _BASE:
        raise TagError(f"unknown tag {tag!r}")
    fn = _BASE[tag]
    return lambda z: scale * fn(np.asarray(z, complex))


def field_from_tag(tag, spec: GridSpec, base_dir: Path | None = None) -> Field:
    """A Field from a tag, a number, or a ``.cfld`` path."""
    if isinstance(tag, (int, float, complex)):
        return Field(spec, np.full((spec.n, spec.n), complex(tag)))
    if not isinstance(tag, str):
        raise TagError(f"unsupported field description {tag!r}")
    if tag.endswith(".cfld"):
        path = Path(tag)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        u = read_cfld(path)
        if u.spec != spec:
            raise TagError(f"{path}: grid {u.spec} does not match {spec}")
        return u
    return Field(spec, parse_tag(tag)(spec.z))


def random_compact(spec: GridSpec, seed: int = 42, radius: float = 1.0, zero_mean: bool = False, smooth: bool = False) -> Field:
    """Seeded complex noise supported in the disc ``|z| < radius``.

    ``smooth`` multiplies by a C-infinity bump instead of the disc indicator;
    ``zero_mean`` removes the mean over the support.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    z = spec.z
    if smooth:
        vals = vals * Bump(radius)(z)
    else:
        vals = np.where(np.abs(z) < radius, vals, 0)
    if zero_mean:
        sel = np.abs(z) < radius
        vals = np.where(sel, vals - vals[sel].mean(), 0)
    return Field(spec, vals)
