"""Uniform periodic square grids and complex fields sampled on them.

A grid covers ``[-l, l)^2`` with ``n`` samples per axis.  Sample ``(j, k)``
sits at ``z = (-l + k h) + i(-l + j h)``: rows are indexed by ``y`` and
columns by ``x``, so ``values[j, k]`` is the value at that point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = [
    "GridSpec",
    "Field",
    "HolderEstimate",
    "make_field",
    "shift",
    "delta",
    "norms",
    "inner",
    "spectral_derivative",
    "holder_quotient",
    "smooth_window",
    "interpolate_spectral",
    "write_cfld",
    "read_cfld",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on the square ``[-l, l)^2``.

    Parameters
    ----------
    n : int
        Samples per axis, even and at least 8.
    l : float
        Half side length of the square.
    """

    n: int
    l: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "l", float(self.l))
        if self.n < 8 or self.n % 2:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"l must be positive, got {self.l}")

    @property
    def h(self) -> float:
        """Grid spacing ``2 l / n``."""
        return 2.0 * self.l / self.n

    @cached_property
    def axis(self) -> np.ndarray:
        """Coordinates ``-l + k h`` shared by both axes."""
        a = -self.l + self.h * np.arange(self.n)
        a.flags.writeable = False
        return a

    @cached_property
    def z(self) -> np.ndarray:
        """Complex sample positions, shape ``(n, n)``."""
        zz = self.axis[None, :] + 1j * self.axis[:, None]
        zz.flags.writeable = False
        return zz

    def index_of(self, point: complex) -> tuple[int, int]:
        """Return ``(j, k)`` of the grid point nearest ``point``."""
        k = int(round((point.real + self.l) / self.h))
        j = int(round((point.imag + self.l) / self.h))
        if not (0 <= j < self.n and 0 <= k < self.n):
            raise ValueError(f"point {point} lies outside the grid square")
        return j, k

    def to_json(self) -> dict:
        return {"n": self.n, "l": self.l}


class Field:
    """Immutable complex samples on a :class:`GridSpec`.

    Parameters
    ----------
    spec : GridSpec
        The grid the values live on.
    values : array_like
        Complex array of shape ``(n, n)``; it is copied unless it is already
        a read-only complex128 array.
    """

    __slots__ = ("spec", "values")

    def __init__(self, spec: GridSpec, values):
        arr = np.asarray(values)
        if arr.shape != (spec.n, spec.n):
            raise ValueError(f"expected shape {(spec.n, spec.n)}, got {arr.shape}")
        if arr.dtype != np.complex128 or arr.flags.writeable:
            arr = np.array(arr, dtype=np.complex128)
        bad = ~np.isfinite(arr)
        if bad.any():
            j, k = np.argwhere(bad)[0]
            raise ValueError(f"non-finite value at grid index (j={j}, k={k})")
        arr.flags.writeable = False
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def __repr__(self):
        return f"Field(n={self.spec.n}, l={self.spec.l})"

    def _other(self, other):
        if isinstance(other, Field):
            if other.spec != self.spec:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Field(self.spec, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.spec, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.spec, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.spec, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.spec, self.values / self._other(other))

    def __neg__(self):
        return Field(self.spec, -self.values)

    def conj(self) -> "Field":
        """Pointwise complex conjugate."""
        return Field(self.spec, np.conj(self.values))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    @classmethod
    def zeros(cls, spec: GridSpec) -> "Field":
        return cls(spec, np.zeros((spec.n, spec.n), complex))


@dataclass(frozen=True)
class HolderEstimate:
    """Per-scale Hölder quotients of a field.

    Attributes
    ----------
    alpha : float
        Exponent used in the quotient.
    scales : tuple of float
        Pair separations ``h 2^s``.
    quotients : tuple of float
        Largest ``|u(x) - u(y)| / |x - y|^alpha`` found at each scale.
    """

    alpha: float
    scales: tuple
    quotients: tuple
    sup_quotient: float = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sup_quotient", float(max(self.quotients, default=0.0)))


def make_field(spec: GridSpec, sampler: Callable[[np.ndarray], np.ndarray]) -> Field:
    """Sample ``sampler`` at every grid point.

    ``sampler`` receives the complex array of positions and must return an
    array of the same shape (or a scalar).
    """
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(sampler(spec.z), dtype=complex), (spec.n, spec.n))
    return Field(spec, vals)


def shift(u: Field, p: int, q: int) -> Field:
    """Circular translation: the result at ``z`` is ``u(z + (p + i q) h)``."""
    return Field(u.spec, np.roll(u.values, (-q, -p), axis=(0, 1)))


def delta(u: Field, p: int, q: int) -> Field:
    """Forward difference ``shift(u, p, q) - u``."""
    return Field(u.spec, np.roll(u.values, (-q, -p), axis=(0, 1)) - u.values)


def _weights(u: Field, mask) -> np.ndarray | None:
    if mask is None:
        return None
    w = mask.values.real if isinstance(mask, Field) else np.asarray(mask, float)
    if w.shape != u.values.shape:
        raise ValueError(f"mask shape {w.shape} does not match field shape {u.values.shape}")
    return w


def norms(u: Field, mask=None) -> tuple[float, float]:
    """Discrete L2 and sup norms.

    The L2 norm carries the cell area, ``h * sqrt(sum |u|^2)``, so it
    approximates the continuum norm.  A mask (0/1 or fractional) acts as a
    quadrature weight for L2 and restricts the sup norm to ``mask > 0``.
    """
    w = _weights(u, mask)
    a2 = np.abs(u.values) ** 2
    if w is None:
        l2 = u.spec.h * np.sqrt(a2.sum())
        linf = np.sqrt(a2.max())
    else:
        l2 = u.spec.h * np.sqrt((w * a2).sum())
        sel = a2[w > 0]
        linf = np.sqrt(sel.max()) if sel.size else 0.0
    return float(l2), float(linf)


def inner(u: Field, v: Field, mask=None) -> complex:
    """Discrete ``<u, v> = sum w u conj(v) h^2``."""
    w = _weights(u, mask)
    prod = u.values * np.conj(v.values)
    if w is not None:
        prod = w * prod
    return complex(prod.sum() * u.spec.h**2)


@lru_cache(maxsize=32)
def _wavenumbers(n: int, l: float) -> tuple[np.ndarray, np.ndarray]:
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=2.0 * l / n)
    kx = np.broadcast_to(k[None, :], (n, n))
    ky = np.broadcast_to(k[:, None], (n, n))
    return kx, ky


@lru_cache(maxsize=32)
def _derivative_symbols(n: int, l: float) -> tuple[np.ndarray, np.ndarray]:
    kx, ky = _wavenumbers(n, l)
    d = 0.5j * (kx - 1j * ky)
    db = 0.5j * (kx + 1j * ky)
    # The Nyquist modes are real-valued cosines on the grid; zeroing them
    # keeps the derivative of a real field real and makes d(conj u) = conj(db u).
    nyq = (np.abs(kx) == np.abs(kx).max()) | (np.abs(ky) == np.abs(ky).max())
    d = np.where(nyq, 0, d)
    db = np.where(nyq, 0, db)
    d.flags.writeable = db.flags.writeable = False
    return d, db


def spectral_derivative(u: Field, which: str) -> Field:
    """Fourier-multiplier derivative ``d/dz`` (``which="dz"``) or ``d/dzbar``.

    Exact on band-limited periodic data; for non-periodic data multiply by
    :func:`smooth_window` first.
    """
    d, db = _derivative_symbols(u.spec.n, u.spec.l)
    if which in ("dz", "d"):
        sym = d
    elif which in ("dzbar", "dbar"):
        sym = db
    else:
        raise ValueError(f"which must be 'dz' or 'dzbar', got {which!r}")
    return Field(u.spec, np.fft.ifft2(sym * np.fft.fft2(u.values)))


def holder_quotient(u: Field, alpha: float, mask=None, max_pairs: int = 10**6) -> HolderEstimate:
    """Sampled Hölder quotients at dyadic separations along both axes.

    Pairs are ``(x, x + s e)`` with ``s = h 2^k`` for ``k = 0 .. log2(n/4)``
    and ``e`` a coordinate direction; both points must satisfy ``mask > 0``
    and pairs never wrap around the periodic boundary.  When more than
    ``max_pairs`` pairs exist at a scale a fixed stride subsamples them.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    spec = u.spec
    v = u.values
    valid = np.ones(v.shape, bool) if mask is None else _weights(u, mask) > 0
    scales, quotients = [], []
    for s in range(int(np.log2(spec.n / 4)) + 1):
        k = 2**s
        best = 0.0
        for axis in (0, 1):
            if axis == 0:
                diff = np.abs(v[k:, :] - v[:-k, :])
                ok = valid[k:, :] & valid[:-k, :]
            else:
                diff = np.abs(v[:, k:] - v[:, :-k])
                ok = valid[:, k:] & valid[:, :-k]
            vals = diff[ok]
            if vals.size > max_pairs:
                vals = vals[:: -(-vals.size // max_pairs)]
            if vals.size:
                best = max(best, float(vals.max()))
        sep = k * spec.h
        scales.append(sep)
        quotients.append(best / sep**alpha)
    return HolderEstimate(alpha=alpha, scales=tuple(scales), quotients=tuple(quotients))


def smooth_window(spec: GridSpec, inner_radius: float, outer_radius: float) -> Field:
    """Radial C-infinity cutoff: 1 for ``|z| <= inner_radius``, 0 beyond ``outer_radius``."""
    if not 0 <= inner_radius < outer_radius:
        raise ValueError("need 0 <= inner_radius < outer_radius")
    r = np.abs(spec.z)
    t = np.clip((r - inner_radius) / (outer_radius - inner_radius), 0.0, 1.0)

    def psi(x):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)

    w = psi(1 - t) / (psi(1 - t) + psi(t))
    return Field(spec, w)


_CFLD_LAYOUT = "row-major-y-outer"


def write_cfld(path, u: Field) -> None:
    """Write ``u`` as a ``.cfld`` file (JSON header line, then c128le data)."""
    header = {
        "magic": "CFLD",
        "version": 1,
        "n": u.spec.n,
        "l": u.spec.l,
        "dtype": "c128le",
        "layout": _CFLD_LAYOUT,
    }
    data = np.ascontiguousarray(u.values, dtype="<c16").tobytes()
    with open(Path(path), "wb") as fh:
        fh.write(json.dumps(header, separators=(",", ":")).encode("utf-8") + b"\n")
        fh.write(data)


def read_cfld(path) -> Field:
    """Read a ``.cfld`` file written by :func:`write_cfld`."""
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise ValueError("missing .cfld header line")
    header = json.loads(raw[:nl].decode("utf-8"))
    if header.get("magic") != "CFLD" or header.get("version") != 1:
        raise ValueError("not a CFLD version 1 file")
    if header.get("dtype") != "c128le" or header.get("layout") != _CFLD_LAYOUT:
        raise ValueError("unsupported .cfld dtype or layout")
    spec = GridSpec(header["n"], header["l"])
    body = raw[nl + 1 :]
    if len(body) != 16 * spec.n**2:
        raise ValueError(f"expected {16 * spec.n**2} data bytes, found {len(body)}")
    vals = np.frombuffer(body, dtype="<c16").reshape(spec.n, spec.n).astype(complex)
    return Field(spec, vals)


def interpolate_spectral(u: Field, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a periodic field at arbitrary points."""
    spec = u.spec
    pts = np.atleast_1d(np.asarray(points, complex)).ravel()
    n = spec.n
    coef = np.fft.fft2(u.values) / n**2
    k = np.fft.fftfreq(n, d=1.0 / n)
    # split Nyquist rows/columns symmetrically so real data interpolate to real values
    ny = n // 2
    coef = np.concatenate([coef, coef[ny : ny + 1, :]], axis=0)
    coef[ny, :] *= 0.5
    coef[-1, :] *= 0.5
    coef = np.concatenate([coef, coef[:, ny : ny + 1]], axis=1)
    coef[:, ny] *= 0.5
    coef[:, -1] *= 0.5
    k = np.concatenate([k, [ny]])
    w = np.pi / spec.l
    ex = np.exp(1j * w * np.outer(k, pts.real + spec.l))  # (n+1, P)
    ey = np.exp(1j * w * np.outer(k, pts.imag + spec.l))
    return np.einsum("jp,jk,kp->p", ey, coef, ex)
