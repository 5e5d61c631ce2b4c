"""Beltrami coefficient algebra and the normal solution of ``psi_zbar = mu psi_z``.

Substituting ``f = g o psi`` into ``f_zbar = a f_z + b conj(f_z) + c`` and
solving the result together with its conjugate for ``g_zetabar`` gives new
coefficients ``(a~, b~, c~)``.  Choosing ``mu = psi_zbar / psi_z`` as the
smaller root of

    conj(a) mu^2 - (1 + |a|^2 - |b|^2) mu + a = 0

makes ``a~`` vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, norms, smooth_window, spectral_derivative
from .plane_ops import beurling, cauchy_green

__all__ = [
    "MuPair",
    "BeltramiMap",
    "NoConvergence",
    "EllipticityError",
    "mu_from_ab",
    "select_mu",
    "transform_coefficients",
    "normal_solution",
]


class NoConvergence(RuntimeError):
    """Raised when a fixed-point iteration misses its tolerance.

    Attributes
    ----------
    history : list of float
        Residuals of the iterations performed.
    report : object or None
        Solver-specific report, when available.
    """

    def __init__(self, message, history=(), report=None):
        super().__init__(message)
        self.history = list(history)
        self.report = report


class EllipticityError(ValueError):
    """Pointwise ellipticity ``|a| + |b| < 1`` (or solvability of the 2x2 system) fails."""


@dataclass(frozen=True)
class MuPair:
    """Roots of the Beltrami quadratic; ``mu2`` is ``inf`` when ``a = 0``."""

    mu1: complex
    mu2: complex

    @property
    def selected(self) -> complex:
        return self.mu1


@dataclass(frozen=True)
class BeltramiMap:
    """Normal solution ``psi = z + T omega`` with ``omega = psi_zbar``."""

    psi: Field
    omega: Field
    residual: float
    psi_z_norm: float
    iterations: int
    history: tuple


def _roots(a, b):
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    if np.any(np.abs(a) + np.abs(b) >= 1):
        raise EllipticityError("ellipticity violated: |a| + |b| must be < 1")
    B = 1 + np.abs(a) ** 2 - np.abs(b) ** 2
    root = np.sqrt(B * B - 4 * np.abs(a) ** 2)
    # mu1 = 2a / (B + root) avoids cancellation and is 0 at a = 0
    mu1 = 2 * a / (B + root)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu2 = np.where(a == 0, np.inf, a * (B + root) / (2 * np.abs(a) ** 2))
    return mu1, mu2


def mu_from_ab(a: complex, b: complex) -> MuPair:
    """Both roots of the Beltrami quadratic for scalar coefficients.

    Raises
    ------
    EllipticityError
        If ``|a| + |b| >= 1``.
    """
    if a == 0:
        if abs(b) >= 1:
            raise EllipticityError("ellipticity violated: |a| + |b| must be < 1")
        return MuPair(0j, complex(np.inf))
    mu1, mu2 = _roots(a, b)
    mu1, mu2 = complex(mu1), complex(mu2)
    if abs(mu1) > abs(mu2) + 1e-14:
        mu1, mu2 = mu2, mu1
    return MuPair(mu1, mu2)


def select_mu(a: Field, b: Field) -> Field:
    """Pointwise smaller-modulus root for coefficient fields."""
    mu1, _ = _roots(a.values, b.values)
    return Field(a.spec, mu1)


def transform_coefficients(a: Field, b: Field, c: Field, psi_z: Field, psi_zbar: Field, tol: float = 1e-14):
    """Coefficients of the equation satisfied by ``g`` where ``f = g o psi``.

    Solves ``alpha X - beta conj(X) = R`` together with its conjugate, where
    ``X = g_zetabar``, ``alpha = conj(psi_z)(1 - a conj(mu))``,
    ``beta = psi_z b mu`` and
    ``R = psi_z (a - mu) g_zeta + conj(psi_z) b conj(g_zeta) + c``.
    The values are returned on the z-grid.

    Returns
    -------
    (Field, Field, Field)
        ``a~, b~, c~`` with ``g_zetabar = a~ g_zeta + b~ conj(g_zeta) + c~``.
    """
    pz = psi_z.values
    if np.any(np.abs(pz) == 0):
        j, k = np.argwhere(np.abs(pz) == 0)[0]
        raise EllipticityError(f"psi_z vanishes at grid index (j={j}, k={k})")
    mu = psi_zbar.values / pz
    av, bv, cv = a.values, b.values, c.values
    alpha = np.conj(pz) * (1 - av * np.conj(mu))
    beta = pz * bv * mu
    P = pz * (av - mu)
    Q = np.conj(pz) * bv
    det = np.abs(alpha) ** 2 - np.abs(beta) ** 2
    scale = np.abs(alpha) ** 2 + np.abs(beta) ** 2
    bad = np.abs(det) <= tol * np.maximum(scale, 1e-300)
    if bad.any():
        j, k = np.argwhere(bad)[0]
        raise EllipticityError(f"singular coefficient system at grid index (j={j}, k={k})")
    ca = np.conj(alpha)
    a_new = (ca * P + beta * np.conj(Q)) / det
    b_new = (ca * Q + beta * np.conj(P)) / det
    c_new = (ca * cv + beta * np.conj(cv)) / det
    spec = a.spec
    return Field(spec, a_new), Field(spec, b_new), Field(spec, c_new)


def _support_radius(mu: Field) -> float:
    spec = mu.spec
    nz = np.abs(mu.values) > 0
    if not nz.any():
        return 0.0
    return float(np.abs(spec.z[nz]).max())


def normal_solution(mu: Field, backend="multiplier", tol: float = 1e-10, maxiter: int = 200) -> BeltramiMap:
    """Normal solution ``psi(z) = z + O(1/z)`` of ``psi_zbar = mu psi_z``.

    Iterates ``omega <- mu (S omega + 1)`` from ``omega = 0``
    until the relative change drops below ``tol``; then ``psi = z + T omega``
    with the convolution transform.  The reported residual is the L2 norm
    of ``psi_zbar - mu psi_z`` over the disc containing the support of
    ``mu``, computed with spectral derivatives of ``T omega`` after a smooth
    cutoff beyond that disc.

    Raises
    ------
    NoConvergence
        If ``maxiter`` iterations do not reach ``tol``.
    """
    spec = mu.spec
    sup = float(np.abs(mu.values).max())
    if sup >= 1:
        raise EllipticityError("Beltrami coefficient must satisfy ||mu||_inf < 1")
    omega = Field.zeros(spec)
    history = []
    it = 0
    for it in range(1, maxiter + 1):
        new = mu * (beurling(omega, backend) + 1.0)
        change = norms(new - omega)[0]
        size = norms(new)[0]
        omega = new
        rel = change / size if size > 0 else 0.0
        history.append(rel)
        if rel <= tol:
            break
    else:
        raise NoConvergence(f"normal solution did not converge in {maxiter} iterations", history)
    tw = cauchy_green(omega, "convolution")
    psi = Field(spec, spec.z) + tw
    # residual on the disc holding supp(mu), with a cutoff beyond it
    r = _support_radius(mu)
    room = spec.l - r
    if room > 8 * spec.h:
        win = smooth_window(spec, r + 0.1 * room, r + 0.8 * room)
    else:
        win = Field(spec, np.ones((spec.n, spec.n)))
    twin = tw * win
    psi_zbar = spectral_derivative(twin, "dzbar")
    psi_z = spectral_derivative(twin, "dz") + 1.0
    region = np.abs(spec.z) <= r + 0.1 * max(room, 0.0)
    res = norms(psi_zbar - mu * psi_z, region)[0]
    return BeltramiMap(psi, omega, res, norms(psi_z, region)[0], it, tuple(history))
