"""Operators restricted to a bounded domain and boundary Cauchy integrals.

``s_omega`` and ``t_omega`` integrate over the domain by extension with
zero.  Used literally (``correction=0``) that is ``mask * S(mask * u)``,
whose quadrature error near the boundary decays only like ``sqrt(h)``
because the integrand jumps across a curve that cuts grid cells.  The
default corrected form subtracts the local Taylor expansion of the density
at the target and integrates it exactly against the characteristic
function of the domain:

    S_Omega g(z) ~ S_h(M g)(z) + g(z) [S chi - S_h M](z)
                   + g_z(z) [T chi - S_h((t - z) M)](z)
                   + g_zbar(z) [I chi - S_h((tbar - zbar) M)](z),

where ``M`` is the cell area fraction, ``S_h`` the discrete transform and
``S chi``, ``T chi``, ``I chi = -(1/pi) \\int_Omega (tbar - zbar)/(t - z)^2 dA``
are evaluated through boundary Cauchy integrals.  ``t_omega`` uses the
first-order analogue.  Output lives on the cells meeting the domain.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _cauchy
from .domains import (
    BoundaryGrid,
    BoundaryTrace,
    DomainSpec,
    mask_field,
    signed_distance,
    support,
)
from .grid import Field, GridSpec, interpolate_spectral, smooth_window, spectral_derivative
from .plane_ops import TransformBackend, _backend, beurling, cauchy_green

__all__ = [
    "s_omega",
    "t_omega",
    "s_omega_bar",
    "t_omega_bar",
    "cauchy_K",
    "cauchy_extension",
    "pompeiu_residual",
    "kerzman_stein_P",
    "domain_window",
]


@lru_cache(maxsize=16)
def _exact_moments(domain: DomainSpec, spec: GridSpec):
    """Exact S chi, T chi and I chi on the support cells.

    With ``H = -K(tbar)`` and ``H2 = -K(tbar^2 / 2)`` (interior Cauchy
    integrals) one has ``S chi = H'``, ``T chi = zbar + H`` and
    ``I chi = H2' - zbar H'``; near the boundary the interior functions are
    continued smoothly so that cells straddling the boundary see the
    interior limit.
    """
    supp = support(domain, spec)
    pts = spec.z[supp]
    comps = domain.components

    def data(ci, theta):
        g = np.conj(comps[ci](theta))
        return np.stack([g, 0.5 * g * g])

    vals = _cauchy.cauchy_field(domain, data, pts, step=spec.h, powers=(1, 2))
    H = -vals[0, 0]
    dH, dH2 = -vals[1, 0], -vals[1, 1]
    zb = np.conj(pts)
    out = {}
    for name, v in (("S", dH), ("T", zb + H), ("I", dH2 - zb * dH)):
        arr = np.zeros((spec.n, spec.n), complex)
        arr[supp] = v
        arr.flags.writeable = False
        out[name] = arr
    return out


@lru_cache(maxsize=32)
def _discrete_moments(domain: DomainSpec, spec: GridSpec, backend: TransformBackend):
    """The discrete operators applied to the mask and its first moments."""
    mask = mask_field(domain, spec)
    z = spec.z
    M = mask.values
    SM = beurling(mask, backend).values
    out = {"SM": SM}
    out["SzM"] = beurling(Field(spec, z * M), backend).values - z * SM
    out["SzbM"] = beurling(Field(spec, np.conj(z) * M), backend).values - np.conj(z) * SM
    if backend is TransformBackend.CONVOLUTION:
        out["TM"] = cauchy_green(mask, backend).values
    for v in out.values():
        v.flags.writeable = False
    return out


def _support_gradient(g: np.ndarray, supp: np.ndarray, h: float):
    """``(g_z, g_zbar)`` by second-order differences that stay inside ``supp``."""
    grads = []
    for ax in (1, 0):
        out = np.zeros_like(g)
        gp, gm = np.roll(g, -1, ax), np.roll(g, 1, ax)
        gpp, gmm = np.roll(g, -2, ax), np.roll(g, 2, ax)
        sp, sm = np.roll(supp, -1, ax), np.roll(supp, 1, ax)
        spp, smm = np.roll(supp, -2, ax), np.roll(supp, 2, ax)
        central = supp & sp & sm
        out[central] = ((gp - gm) / (2 * h))[central]
        fwd = supp & ~central & sp & spp
        out[fwd] = ((-3 * g + 4 * gp - gpp) / (2 * h))[fwd]
        bwd = supp & ~central & ~fwd & sm & smm
        out[bwd] = ((3 * g - 4 * gm + gmm) / (2 * h))[bwd]
        grads.append(out)
    gx, gy = grads
    return 0.5 * (gx - 1j * gy), 0.5 * (gx + 1j * gy)


def _check_domain_backend(backend):
    return _backend(backend)


def s_omega(u: Field, domain: DomainSpec, backend="convolution", correction: int = 2) -> Field:
    """Beurling transform over a domain, ``p.v. \\int_Omega u(t) d^2t / (t - z)^2``.

    Parameters
    ----------
    u : Field
        Density; only its values on cells meeting the domain are used.
        They are read as point samples of a function smooth up to the
        boundary, so pass ``u`` itself rather than ``mask * u``.
    domain : DomainSpec
    backend : {"convolution", "multiplier"}
    correction : {0, 1, 2}
        0 gives the literal ``mask * S(mask * u)``.  1 and 2 add boundary
        corrections of that order in the local Taylor expansion of ``u``.
    """
    backend = _check_domain_backend(backend)
    spec = u.spec
    mask = mask_field(domain, spec)
    if correction == 0:
        return mask * beurling(mask * u, backend)
    if correction not in (1, 2):
        raise ValueError("correction must be 0, 1 or 2")
    supp = support(domain, spec)
    g = np.where(supp, u.values, 0)
    ex = _exact_moments(domain, spec)
    dm = _discrete_moments(domain, spec, backend)
    out = beurling(Field(spec, mask.values * g), backend).values + g * (ex["S"] - dm["SM"])
    if correction == 2:
        gz, gzb = _support_gradient(g, supp, spec.h)
        out += gz * (ex["T"] - dm["SzM"]) + gzb * (ex["I"] - dm["SzbM"])
    return Field(spec, np.where(supp, out, 0))


def t_omega(u: Field, domain: DomainSpec, backend="convolution", correction: int = 1) -> Field:
    """Cauchy-Green transform over a domain, ``\\int_Omega u(t) d^2t / (t - z)``.

    Only the convolution backend is accepted: the multiplier version loses
    the additive constant.  ``correction`` is 0 (literal masked formula) or
    1 (boundary correction of the zeroth Taylor term).
    """
    backend = _check_domain_backend(backend)
    if backend is not TransformBackend.CONVOLUTION:
        raise ValueError("t_omega requires the convolution backend")
    spec = u.spec
    mask = mask_field(domain, spec)
    if correction == 0:
        return mask * cauchy_green(mask * u, backend)
    if correction != 1:
        raise ValueError("correction must be 0 or 1")
    supp = support(domain, spec)
    g = np.where(supp, u.values, 0)
    ex = _exact_moments(domain, spec)
    dm = _discrete_moments(domain, spec, backend)
    out = cauchy_green(Field(spec, mask.values * g), backend).values + g * (ex["T"] - dm["TM"])
    return Field(spec, np.where(supp, out, 0))


def s_omega_bar(u: Field, domain: DomainSpec, backend="convolution", correction: int = 2) -> Field:
    """``conj(S_Omega(conj u))``."""
    return s_omega(u.conj(), domain, backend, correction).conj()


def t_omega_bar(u: Field, domain: DomainSpec, backend="convolution", correction: int = 1) -> Field:
    """``conj(T_Omega(conj u))``."""
    return t_omega(u.conj(), domain, backend, correction).conj()


def _arc_spacing(bgrid: BoundaryGrid) -> float:
    return max(np.abs(c.dgamma).max() for c in bgrid.components) * 2 * np.pi / bgrid.m


def cauchy_K(trace: BoundaryTrace, bgrid: BoundaryGrid, targets) -> np.ndarray:
    """Boundary Cauchy integral ``(2 pi i)^-1 \\oint u(t) dt / (t - z)`` by the trapezoid rule.

    Targets outside the domain or closer to the boundary than five arc
    spacings are flagged by a NaN entry.
    """
    trace.check(bgrid)
    z = np.atleast_1d(np.asarray(targets, complex)).ravel()
    out = np.zeros(z.size, complex)
    dtheta = 2 * np.pi / bgrid.m
    for vals, comp in zip(trace.values, bgrid.components):
        w = vals * comp.dgamma * dtheta / (2j * np.pi)
        out += (w[None, :] / (comp.gamma[None, :] - z[:, None])).sum(axis=1)
    sd = signed_distance(bgrid.domain, z)
    out[sd < 5 * _arc_spacing(bgrid)] = np.nan
    return out


def cauchy_extension(trace: BoundaryTrace, bgrid: BoundaryGrid, spec: GridSpec, derivative: bool = False):
    """Cauchy integral of a trace on every grid cell meeting the domain.

    Cells near or straddling the boundary receive the smooth continuation of
    the interior function.  Returns a Field, or a pair ``(K u, (K u)')`` when
    ``derivative`` is true.
    """
    trace.check(bgrid)
    domain = bgrid.domain
    supp = support(domain, spec)
    interps = [_cauchy.trig_interpolant(v) for v in trace.values]

    def data(ci, theta):
        return interps[ci](theta)[None, :]

    powers = (1, 2) if derivative else (1,)
    vals = _cauchy.cauchy_field(domain, data, spec.z[supp], step=spec.h, powers=powers, m_min=bgrid.m)
    fields = []
    for p in range(len(powers)):
        arr = np.zeros((spec.n, spec.n), complex)
        arr[supp] = vals[p, 0]
        fields.append(Field(spec, arr))
    return tuple(fields) if derivative else fields[0]


def domain_window(domain: DomainSpec, spec: GridSpec) -> Field:
    """Smooth cutoff equal to 1 on a neighbourhood of the domain and 0 near the grid edge."""
    r = domain.bounding_radius
    if domain.kind == "disc":
        r = abs(domain.center) + domain.radius
    gap = spec.l - r
    if gap <= 4 * spec.h:
        raise ValueError("grid square leaves no room for a smooth cutoff around the domain")
    return smooth_window(spec, r + 0.15 * gap, r + 0.9 * gap)


def pompeiu_residual(u: Field, domain: DomainSpec, bgrid: BoundaryGrid, probes) -> float:
    """Largest defect of ``K(u|_bOmega) + T_Omega(dbar u) = u`` over interior probes.

    ``u`` is a smooth field sampled on the whole grid; it is multiplied by a
    cutoff that equals 1 near the domain before spectral differentiation and
    spectral interpolation to the boundary nodes.  Probes are snapped to the
    nearest grid points.
    """
    spec = u.spec
    uw = u * domain_window(domain, spec)
    trace = BoundaryTrace(tuple(interpolate_spectral(uw, c.gamma) for c in bgrid.components))
    tdu = t_omega(spectral_derivative(uw, "dzbar"), domain)
    idx = [spec.index_of(complex(p)) for p in np.atleast_1d(probes)]
    pts = np.array([spec.z[j, k] for j, k in idx])
    k_vals = cauchy_K(trace, bgrid, pts)
    res = [k_vals[i] + tdu.values[j, k] - u.values[j, k] for i, (j, k) in enumerate(idx)]
    return float(np.max(np.abs(res))) if res else 0.0


def kerzman_stein_P(trace: BoundaryTrace, bgrid: BoundaryGrid) -> BoundaryTrace:
    """``P = K + Kbar - I`` on a single boundary component.

    Uses ``P u(z_i) = (1/pi) \\oint u d_t arg(t - z_i)`` with the smooth kernel
    ``Im(gamma'(theta) / (gamma(theta) - gamma(theta_i)))`` and diagonal value
    ``Im(gamma''/(2 gamma'))``.
    """
    if len(bgrid.components) != 1:
        raise ValueError("kerzman_stein_P supports single-component boundaries only")
    trace.check(bgrid)
    comp = bgrid.components[0]
    g, dg, d2g = comp.gamma, comp.dgamma, comp.d2gamma
    diff = g[None, :] - g[:, None]  # row i: target, column j: source
    np.fill_diagonal(diff, 1.0)
    kern = np.imag(dg[None, :] / diff)
    np.fill_diagonal(kern, np.imag(d2g / (2 * dg)))
    vals = (kern @ trace.values[0]) * (2 * np.pi / bgrid.m) / np.pi
    return BoundaryTrace((vals,))
