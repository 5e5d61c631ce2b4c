"""Operators special to the unit disc D.

The Bergman projection is expanded in the orthonormal monomials
``e_k = sqrt((k+1)/pi) z^k``.  ``S1 u = S_D u - B conj(u)`` is an isometry of
L2(D), and ``T1 u = T_D u + \\int_D z conj(u) d^2t / (1 - z tbar)`` is a right
inverse of dbar whose real part vanishes on the unit circle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain_ops import s_omega, t_omega
from .domains import BoundaryTrace, DomainSpec, mask_field, support
from .grid import Field, GridSpec

__all__ = [
    "UNIT_DISC",
    "MonomialMoments",
    "monomial_moments",
    "bergman_disc",
    "s1",
    "t1",
    "schwarz_coefficients",
    "schwarz_extension",
    "eval_polynomial",
]

UNIT_DISC = DomainSpec.disc()


@dataclass(frozen=True)
class MonomialMoments:
    """Inner products ``m_k = <v, e_k>`` for ``k = 0 .. degree``."""

    degree: int
    moments: np.ndarray


def _check_degree(d: int) -> None:
    if d < 0:
        raise ValueError(f"degree must be non-negative, got {d}")


def _powers(z: np.ndarray, d: int) -> np.ndarray:
    out = np.empty((d + 1,) + z.shape, complex)
    out[0] = 1.0
    for k in range(1, d + 1):
        out[k] = out[k - 1] * z
    return out


def monomial_moments(v: Field, d: int = 32) -> MonomialMoments:
    """Masked-quadrature moments of ``v`` against the orthonormal disc monomials."""
    _check_degree(d)
    spec = v.spec
    M = mask_field(UNIT_DISC, spec).values.real
    sel = M > 0
    z = spec.z[sel]
    w = M[sel] * v.values[sel] * spec.h**2
    zk = _powers(np.conj(z), d)
    norm = np.sqrt((np.arange(d + 1) + 1) / np.pi)
    return MonomialMoments(d, norm * (zk @ w))


def eval_polynomial(coeffs, spec: GridSpec, domain: DomainSpec = UNIT_DISC) -> Field:
    """``sum_k coeffs[k] z^k`` on the cells meeting ``domain``, zero elsewhere."""
    supp = support(domain, spec)
    z = spec.z[supp]
    acc = np.zeros(z.shape, complex)
    for c in np.asarray(coeffs, complex)[::-1]:
        acc = acc * z + c
    out = np.zeros((spec.n, spec.n), complex)
    out[supp] = acc
    return Field(spec, out)


@lru_cache(maxsize=16)
def _gram_factor(n: int, l: float, d: int):
    """Cholesky factor of the masked-quadrature Gram matrix of the ``e_k``."""
    spec = GridSpec(n, l)
    M = mask_field(UNIT_DISC, spec).values.real
    sel = M > 0
    e = _powers(spec.z[sel], d) * np.sqrt((np.arange(d + 1) + 1) / np.pi)[:, None]
    gram = (e * M[sel] * spec.h**2) @ np.conj(e).T
    return np.linalg.cholesky(gram)


def bergman_disc(v: Field, d: int = 32) -> Field:
    """Bergman projection of ``v`` truncated to degree ``d``.

    The moments are corrected by the discrete Gram matrix of ``e_0 .. e_d``,
    so the result is the orthogonal projection for the masked inner product
    and applying it twice changes nothing beyond rounding.
    """
    mm = monomial_moments(v, d)
    L = _gram_factor(v.spec.n, v.spec.l, d)
    # the Gram matrix is Hermitian with entries <e_j, e_k>; solve G^T c = m
    c = np.linalg.solve(L.T, np.linalg.solve(L.conj(), mm.moments))
    norm = np.sqrt((np.arange(d + 1) + 1) / np.pi)
    return eval_polynomial(c * norm, v.spec)


def s1(u: Field, backend="convolution", d: int = 32) -> Field:
    """``S1 u = S_D u - B conj(u)``."""
    return s_omega(u, UNIT_DISC, backend) - bergman_disc(u.conj(), d)


def t1(u: Field, d: int = 32) -> Field:
    """``T1 u = T_D u + z sum_k z^k \\int_D conj(u) tbar^k d^2t``, the series truncated at ``d``."""
    _check_degree(d)
    spec = u.spec
    M = mask_field(UNIT_DISC, spec).values.real
    sel = M > 0
    t = spec.z[sel]
    w = M[sel] * np.conj(u.values[sel]) * spec.h**2
    c = -(_powers(np.conj(t), d) @ w) / np.pi
    coeffs = np.concatenate([[0.0], c])
    return t_omega(u, UNIT_DISC) + eval_polynomial(coeffs, spec)


def schwarz_coefficients(f0: BoundaryTrace, rtol: float = 1e-10) -> np.ndarray:
    """Taylor coefficients of the holomorphic ``f1`` with ``Re f1 = f0`` on the circle and ``Im f1(0) = 0``.

    ``f0`` holds real samples at ``theta_j = 2 pi j / m`` on the unit circle.
    """
    vals = f0.values[0]
    if len(f0.values) != 1:
        raise ValueError("Schwarz extension needs a single boundary component")
    scale = max(1.0, float(np.abs(vals).max()))
    if np.abs(vals.imag).max() > rtol * scale:
        raise ValueError("boundary data for the Schwarz extension must be real")
    m = vals.size
    c = np.fft.fft(vals.real) / m
    half = m // 2
    coeffs = np.zeros(half, complex)
    coeffs[0] = c[0].real
    coeffs[1:] = 2 * c[1:half]
    return coeffs


def schwarz_extension(f0: BoundaryTrace, spec: GridSpec, derivative: bool = False):
    """Holomorphic extension ``f1`` of real boundary data, sampled on the disc cells.

    Returns ``f1`` or ``(f1, f1')`` when ``derivative`` is true.
    """
    coeffs = schwarz_coefficients(f0)
    f1 = eval_polynomial(coeffs, spec)
    if not derivative:
        return f1
    dcoeffs = coeffs[1:] * np.arange(1, coeffs.size)
    return f1, eval_polynomial(dcoeffs, spec)
