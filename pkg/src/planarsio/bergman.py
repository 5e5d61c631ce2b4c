"""Approximate Bergman projections ``B_n = I - (S_Omega Sbar_Omega)^n`` and a reference projection.

The reference projection is independent of the transform code: it
orthonormalizes polynomials (Laurent polynomials on the annulus) in the
masked grid inner product and projects onto their span.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .domain_ops import s_omega, s_omega_bar
from .domains import DomainSpec, mask_field, support
from .grid import Field, GridSpec, norms

__all__ = [
    "BergmanCompareReport",
    "BergmanBasis",
    "b_omega",
    "b_n",
    "bergman_basis",
    "bergman_reference",
    "b_square_defect",
    "compare",
]

log = logging.getLogger(__name__)

_DEPENDENCE_TOL = 1e-6  # relative norm drop ~ Gram condition 1e12


@dataclass(frozen=True)
class BergmanCompareReport:
    """Distances of ``B_n v`` to the reference projection.

    Attributes
    ----------
    n_list : list of int
    errors : list of float
        ``||B_n v - ref||_2 / ||v||_2`` for each ``n``.
    final_error : float
        Error for the last ``n``.
    basis_degree : int
        Degree of the reference basis actually used.
    """

    n_list: list
    errors: list
    final_error: float
    basis_degree: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _restrict(v: Field, domain: DomainSpec) -> Field:
    return Field(v.spec, np.where(support(domain, v.spec), v.values, 0))


def b_n(v: Field, domain: DomainSpec, n: int, backend="convolution") -> Field:
    """``v - (S_Omega Sbar_Omega)^n v`` by ``n`` repeated applications."""
    if n < 1:
        raise ValueError("n must be at least 1")
    v = _restrict(v, domain)
    w = v
    for _ in range(n):
        w = s_omega(s_omega_bar(w, domain, backend), domain, backend)
    return v - w


def b_omega(v: Field, domain: DomainSpec, backend="convolution") -> Field:
    """``B_Omega v = v - S_Omega(conj(S_Omega(conj v)))``."""
    return b_n(v, domain, 1, backend)


def b_square_defect(v: Field, domain: DomainSpec, backend="convolution") -> Field:
    """``B_Omega(B_Omega v) - B_Omega v``."""
    b1 = b_omega(v, domain, backend)
    return b_omega(b1, domain, backend) - b1


@dataclass(frozen=True)
class BergmanBasis:
    """Orthonormal (Laurent) polynomials on the support cells of a domain."""

    degree: int
    points: np.ndarray  # boolean support mask
    weights: np.ndarray  # quadrature weights on the support cells
    vectors: np.ndarray  # (count, n_support) orthonormal rows


def _orthogonalize(w, basis, weights):
    for _ in range(2):
        for q in basis:
            w = w - np.sum(weights * w * np.conj(q)) * q
    return w


@lru_cache(maxsize=16)
def bergman_basis(domain: DomainSpec, spec: GridSpec, degree: int = 24) -> BergmanBasis:
    """Orthonormalize ``z^k`` (``k = 0..d``, or ``-d..d`` on the annulus).

    New directions are generated as ``z q_{k-1}`` (and ``q_{-(k-1)} / z``)
    and orthogonalized twice against all previous vectors, which spans the
    same space as the monomials but stays well conditioned.  The degree is
    reduced, with a warning, once a new direction is numerically dependent.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    M = mask_field(domain, spec).values.real
    sel = M > 0
    z = spec.z[sel]
    w8 = M[sel] * spec.h**2
    one = np.ones(z.size, complex)
    q0 = one / np.sqrt(np.sum(w8))
    basis = [q0]
    last_pos = last_neg = q0
    used = 0
    for k in range(1, degree + 1):
        cands = [("pos", z * last_pos)]
        if not domain.simply_connected:
            cands.append(("neg", last_neg / z))
        new = []
        for side, c in cands:
            ref = np.sqrt(np.sum(w8 * np.abs(c) ** 2))
            r = _orthogonalize(c, basis + [q for _, q in new], w8)
            nu = np.sqrt(np.sum(w8 * np.abs(r) ** 2))
            if nu < _DEPENDENCE_TOL * ref:
                break
            new.append((side, r / nu))
        if len(new) < len(cands):
            log.warning("reference basis degree reduced from %d to %d (ill-conditioned)", degree, used)
            break
        for side, q in new:
            basis.append(q)
            if side == "pos":
                last_pos = q
            else:
                last_neg = q
        used = k
    vecs = np.array(basis)
    vecs.flags.writeable = False
    return BergmanBasis(used, sel, w8, vecs)


def bergman_reference(v: Field, domain: DomainSpec, basis_degree: int = 24) -> Field:
    """Orthogonal projection of ``v`` onto the (Laurent) polynomials of degree ``basis_degree``."""
    basis = bergman_basis(domain, v.spec, basis_degree)
    vals = v.values[basis.points]
    coef = np.conj(basis.vectors) @ (basis.weights * vals)
    out = np.zeros(v.values.shape, complex)
    out[basis.points] = coef @ basis.vectors
    return Field(v.spec, out)


def compare(v: Field, domain: DomainSpec, n_list=(1, 2, 4, 8), backend="convolution", basis_degree: int = 24) -> BergmanCompareReport:
    """Relative distance of ``B_n v`` to the reference projection for each ``n``.

    ``B_n`` for increasing ``n`` is built incrementally, so the cost is that
    of the largest ``n``.
    """
    n_list = sorted(int(k) for k in n_list)
    if not n_list or n_list[0] < 1:
        raise ValueError("n_list must contain positive integers")
    mask = mask_field(domain, v.spec)
    v = _restrict(v, domain)
    ref = bergman_reference(v, domain, basis_degree)
    vnorm = norms(v, mask)[0]
    errors = []
    w, done = v, 0
    for n in n_list:
        for _ in range(n - done):
            w = s_omega(s_omega_bar(w, domain, backend), domain, backend)
        done = n
        errors.append(norms(v - w - ref, mask)[0] / vnorm)
    deg = bergman_basis(domain, v.spec, basis_degree).degree
    return BergmanCompareReport(list(n_list), errors, errors[-1], deg)
