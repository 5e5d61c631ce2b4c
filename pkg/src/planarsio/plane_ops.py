"""Whole-plane Beurling (S) and Cauchy-Green (T) transforms.

Normalization: ``d^2 t = -dA / pi``, so

    S u(z) = -(1/pi) p.v. \\int u(t) / (t - z)^2 dA,
    T u(z) = -(1/pi) \\int u(t) / (t - z) dA,

with ``dbar T = I`` and ``d T = S``.

Two backends are offered.  ``multiplier`` multiplies Fourier coefficients
by the symbols ``conj(xi)/xi`` and ``-2i/xi`` on the periodic grid;
``convolution`` performs a zero-padded linear convolution with the kernel
samples ``-h^2 / (pi (t - z)^p)``, omitting the singular cell.
"""

from __future__ import annotations

import enum
import logging
from functools import lru_cache

import numpy as np

from .grid import Field, GridSpec, _wavenumbers

__all__ = [
    "TransformBackend",
    "beurling",
    "cauchy_green",
    "conj_op",
    "commutator_S",
    "kernel_convolve",
]

log = logging.getLogger(__name__)


class TransformBackend(str, enum.Enum):
    MULTIPLIER = "multiplier"
    CONVOLUTION = "convolution"


def _backend(backend) -> TransformBackend:
    try:
        return TransformBackend(backend)
    except ValueError:
        raise ValueError(f"unknown backend {backend!r}; use 'multiplier' or 'convolution'") from None


@lru_cache(maxsize=16)
def _s_symbol(n: int, l: float) -> np.ndarray:
    kx, ky = _wavenumbers(n, l)
    xi = kx + 1j * ky
    sym = np.zeros((n, n), complex)
    nz = xi != 0
    sym[nz] = np.conj(xi[nz]) / xi[nz]
    # On the Nyquist lines the symbol must be real and sign-symmetric under
    # k -> -k for S Sbar = I to hold exactly on the discrete torus.
    ny = n // 2
    corner = sym[ny, ny]
    sym[:, ny] = 1.0
    sym[ny, :] = -1.0
    sym[ny, ny] = corner
    sym.flags.writeable = False
    return sym


@lru_cache(maxsize=16)
def _t_symbol(n: int, l: float) -> np.ndarray:
    kx, ky = _wavenumbers(n, l)
    xi = kx + 1j * ky
    sym = np.zeros((n, n), complex)
    nz = xi != 0
    sym[nz] = -2j / xi[nz]
    sym.flags.writeable = False
    return sym


@lru_cache(maxsize=32)
def _kernel_hat(n: int, l: float, kind: str) -> np.ndarray:
    """FFT of the 2n x 2n padded kernel indexed by the offset s = z - t."""
    h = 2.0 * l / n
    p = np.fft.fftfreq(2 * n, d=1.0 / (2 * n))
    s = h * (p[None, :] + 1j * p[:, None])
    d = -s  # t - z
    k = np.zeros_like(s)
    nz = s != 0
    if kind == "inv_square":
        k[nz] = 1.0 / d[nz] ** 2
    elif kind == "inv_linear":
        k[nz] = 1.0 / d[nz]
    else:
        raise ValueError(kind)
    out = np.fft.fft2(-(h * h / np.pi) * k)
    out.flags.writeable = False
    return out


def kernel_convolve(values: np.ndarray, spec: GridSpec, kind: str) -> np.ndarray:
    """Linear convolution ``sum_t K(t - z) v(t) (-h^2/pi)`` with the centre cell omitted.

    ``kind`` is ``inv_square`` or ``inv_linear``.
    """
    n = spec.n
    pad = np.zeros((2 * n, 2 * n), complex)
    pad[:n, :n] = values
    return np.fft.ifft2(np.fft.fft2(pad) * _kernel_hat(n, spec.l, kind))[:n, :n]


def _check_margin(u: Field) -> None:
    v = np.abs(u.values)
    peak = v.max()
    if peak == 0:
        return
    spec = u.spec
    margin = max(1, spec.n // 8)
    edge = np.ones_like(v, bool)
    edge[margin:-margin, margin:-margin] = False
    if v[edge].max() > 1e-8 * peak:
        log.warning("field is not compactly supported within the l/4 grid margin; whole-plane transform is approximate")


def _apply(u: Field, backend, power: int) -> np.ndarray:
    backend = _backend(backend)
    n, l = u.spec.n, u.spec.l
    if backend is TransformBackend.MULTIPLIER:
        # periodic images only matter for the multiplier backend
        _check_margin(u)
        sym = _s_symbol(n, l) if power == 2 else _t_symbol(n, l)
        return np.fft.ifft2(sym * np.fft.fft2(u.values))
    return kernel_convolve(u.values, u.spec, "inv_square" if power == 2 else "inv_linear")


def beurling(u: Field, backend="multiplier") -> Field:
    """Whole-plane Beurling transform ``S u``.

    The multiplier backend has a unimodular symbol (DC mapped to 0), so it
    is an exact isometry on zero-mean fields.
    """
    return Field(u.spec, _apply(u, backend, 2))


def cauchy_green(u: Field, backend="convolution") -> Field:
    """Whole-plane Cauchy-Green transform ``T u``.

    With the multiplier backend the DC mode is dropped, so the result
    differs from the true transform by an additive constant (plus periodic
    images); use the convolution backend when absolute values matter.
    """
    return Field(u.spec, _apply(u, backend, 1))


def conj_op(u: Field, op: str, backend="multiplier") -> Field:
    """The conjugate operators ``Sbar u = conj(S conj u)`` and ``Tbar``."""
    if op == "S":
        return beurling(u.conj(), backend).conj()
    if op == "T":
        return cauchy_green(u.conj(), backend).conj()
    raise ValueError(f"op must be 'S' or 'T', got {op!r}")


def commutator_S(a: Field, u: Field, backend="multiplier") -> Field:
    """Commutator ``[S, a] u = S(a u) - a S(u)``."""
    if a.spec != u.spec:
        raise ValueError("a and u live on different grids")
    return beurling(a * u, backend) - a * beurling(u, backend)
