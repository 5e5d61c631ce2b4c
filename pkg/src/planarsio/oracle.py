"""Independent reference computations.

Nothing here calls the transform code: ``direct_pv`` sums the singular
kernels cell by cell, circle operators act on exact Fourier coefficients,
and disc integrals and transforms of polynomials in ``z, zbar`` use closed
forms.  Polynomials are dictionaries ``{(a, b): c}`` standing for
``sum c z^a zbar^b``.
"""

from __future__ import annotations

import re

import numpy as np

from .domains import BoundaryTrace, DomainSpec, mask_field
from .grid import Field, GridSpec

__all__ = [
    "OracleError",
    "direct_pv",
    "circle_fourier_apply",
    "disc_polar_integral",
    "poly_eval",
    "poly_dz",
    "poly_dzbar",
    "poly_mul",
    "poly_conj",
    "disc_T_poly",
    "disc_S_poly",
    "disc_bergman_poly",
    "chi_disc_T",
    "chi_disc_S",
    "annulus_tbar_inv_z",
    "grid_probe",
]


class OracleError(ValueError):
    """Input outside what an oracle supports."""


def direct_pv(u: Field, domain: DomainSpec, kernel: str, probes) -> list:
    """Principal-value sums ``-(h^2/pi) sum_{t != z} M(t) u(t) / (t - z)^p`` at grid probes.

    ``kernel`` is ``inv_square`` (p = 2) or ``inv_linear`` (p = 1).  The
    cell at the probe is omitted.  Costs O(n^2) per probe.

    Raises
    ------
    OracleError
        If a probe is not a grid point or the kernel is unknown.
    """
    power = {"inv_square": 2, "inv_linear": 1}.get(kernel)
    if power is None:
        raise OracleError(f"unknown kernel {kernel!r}")
    spec = u.spec
    M = mask_field(domain, spec).values.real
    sel = M > 0
    t = spec.z[sel]
    wu = M[sel] * u.values[sel]
    out = []
    for p in probes:
        p = complex(p)
        k = (p.real + spec.l) / spec.h
        j = (p.imag + spec.l) / spec.h
        if abs(k - round(k)) > 1e-9 or abs(j - round(j)) > 1e-9:
            raise OracleError(f"probe {p} is not a grid point")
        d = t - spec.z[int(round(j)), int(round(k))]
        keep = d != 0
        out.append(complex(-(spec.h**2 / np.pi) * np.sum(wu[keep] / d[keep] ** power)))
    return out


def _check_circle(domain: DomainSpec | None) -> None:
    if domain is None:
        return
    if domain.kind != "disc" or domain.radius != 1.0 or domain.center != 0:
        raise OracleError("circle oracles need the unit circle")


def circle_fourier_apply(trace: BoundaryTrace, operator: str, domain: DomainSpec | None = None) -> BoundaryTrace:
    """Apply ``K``, ``Kbar`` or ``P`` to samples at ``theta_j = 2 pi j / m`` on the unit circle.

    ``K`` keeps wavenumbers ``k >= 0``, ``Kbar`` keeps ``k <= 0`` and
    ``P = K + Kbar - I`` keeps only the mean.
    """
    _check_circle(domain)
    if len(trace.values) != 1:
        raise OracleError("circle oracles need a single boundary component")
    vals = np.asarray(trace.values[0], complex)
    m = vals.size
    c = np.fft.fft(vals)
    k = np.fft.fftfreq(m, 1.0 / m)
    if m % 2 == 0:
        # the Nyquist mode cos(m theta / 2) is split evenly between +-m/2
        nyq = k == -m // 2
    else:
        nyq = np.zeros(m, bool)
    if operator == "K":
        keep = np.where(k >= 0, 1.0, 0.0)
        keep[nyq] = 0.5
    elif operator == "Kbar":
        keep = np.where(k <= 0, 1.0, 0.0)
        keep[nyq] = 0.5
    elif operator == "P":
        keep = np.where(k == 0, 1.0, 0.0)
    else:
        raise OracleError(f"operator must be 'K', 'Kbar' or 'P', got {operator!r}")
    return BoundaryTrace((np.fft.ifft(c * keep),))


_MONO = re.compile(r"^t\^(\d+)\s*\*?\s*tbar\^(\d+)$")


def disc_polar_integral(tag: str) -> complex:
    """Closed-form ``\\int_D integrand dA`` over the unit disc.

    Supported tags: ``"1"``, ``"|t|^2"``, ``"|t|^2k"`` for integer k, and
    ``"t^a tbar^b"``.  Uses ``\\int_D t^a tbar^b dA = pi / (a + 1)`` if
    ``a = b`` and 0 otherwise.
    """
    tag = tag.strip()
    if tag == "1":
        a = b = 0
    elif tag.startswith("|t|^"):
        try:
            p = int(tag[4:])
        except ValueError:
            raise OracleError(f"unsupported integrand {tag!r}") from None
        if p < 0 or p % 2:
            raise OracleError(f"unsupported integrand {tag!r}")
        a = b = p // 2
    else:
        mt = _MONO.match(tag)
        if mt is None:
            raise OracleError(f"unsupported integrand {tag!r}")
        a, b = int(mt.group(1)), int(mt.group(2))
    return complex(np.pi / (a + 1)) if a == b else 0j


# -- polynomials in z, zbar --------------------------------------------------------


def poly_eval(poly: dict, z) -> np.ndarray:
    z = np.asarray(z, complex)
    zb = np.conj(z)
    out = np.zeros(z.shape, complex)
    for (a, b), c in poly.items():
        out += c * z**a * zb**b
    return out


def _clean(poly: dict) -> dict:
    return {k: v for k, v in poly.items() if v != 0}


def _add(poly: dict, key, value) -> None:
    poly[key] = poly.get(key, 0) + value


def poly_dz(poly: dict) -> dict:
    out = {}
    for (a, b), c in poly.items():
        if a:
            _add(out, (a - 1, b), a * c)
    return _clean(out)


def poly_dzbar(poly: dict) -> dict:
    out = {}
    for (a, b), c in poly.items():
        if b:
            _add(out, (a, b - 1), b * c)
    return _clean(out)


def poly_mul(p: dict, q: dict) -> dict:
    out = {}
    for (a, b), c in p.items():
        for (d, e), f in q.items():
            _add(out, (a + d, b + e), c * f)
    return _clean(out)


def poly_conj(poly: dict) -> dict:
    return {(b, a): np.conj(c) for (a, b), c in poly.items()}


def disc_T_poly(poly: dict) -> dict:
    """``T_D`` of a polynomial, valid inside the unit disc.

    ``phi = z^a zbar^(b+1) / (b+1)`` has ``dbar phi = z^a zbar^b``, and on
    the circle ``phi = z^(a-b-1) / (b+1)``, whose Cauchy integral is that
    monomial when ``a >= b + 1`` and 0 otherwise.  Pompeiu gives
    ``T_D(z^a zbar^b) = phi - K phi``.
    """
    out = {}
    for (a, b), c in poly.items():
        _add(out, (a, b + 1), c / (b + 1))
        if a >= b + 1:
            _add(out, (a - b - 1, 0), -c / (b + 1))
    return _clean(out)


def disc_S_poly(poly: dict) -> dict:
    """``S_D = d T_D`` of a polynomial inside the unit disc."""
    return poly_dz(disc_T_poly(poly))


def disc_bergman_poly(poly: dict) -> dict:
    """Bergman projection on the unit disc: ``B(z^a zbar^b) = (a-b+1)/(a+1) z^(a-b)`` if ``a >= b``, else 0."""
    out = {}
    for (a, b), c in poly.items():
        if a >= b:
            _add(out, (a - b, 0), c * (a - b + 1) / (a + 1))
    return _clean(out)


# -- classical closed forms ---------------------------------------------------


def chi_disc_T(z) -> np.ndarray:
    """``T chi_D``: ``zbar`` inside the unit disc, ``1/z`` outside."""
    z = np.asarray(z, complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(z) < 1, np.conj(z), 1 / z)


def chi_disc_S(z) -> np.ndarray:
    """``S chi_D``: 0 inside the unit disc, ``-1/z^2`` outside."""
    z = np.asarray(z, complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(z) < 1, 0, -1 / z**2)


def annulus_tbar_inv_z(z) -> np.ndarray:
    """``Tbar_Omega(1/z) = 2 log|z|`` inside an annulus with outer radius 1."""
    with np.errstate(divide="ignore"):
        return 2 * np.log(np.abs(np.asarray(z, complex)))


def grid_probe(spec: GridSpec, point: complex) -> complex:
    """The grid point nearest ``point``."""
    j, k = spec.index_of(point)
    return complex(spec.z[j, k])
