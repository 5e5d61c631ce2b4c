"""Cauchy integrals over trig boundaries evaluated at arbitrary interior points.

The trapezoid rule on a smooth closed curve converges geometrically with a
rate set by the distance of the target to the curve, so the node count is
chosen per target from that distance.  Targets closer than ``step`` to the
boundary, including cell centres just outside the domain, are evaluated at
four points along the inward normal and extrapolated by a cubic, which
yields the smooth continuation of the interior function.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .domains import DomainSpec, project

# data(component_index, theta) -> array of shape (q, len(theta))
BoundaryData = Callable[[int, np.ndarray], np.ndarray]

_NODES_PER_DISTANCE = 6.0
_CHUNK = 2**21


def trig_interpolant(samples: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Trigonometric interpolant of equispaced periodic samples."""
    samples = np.asarray(samples, complex)
    m = samples.size
    coef = np.fft.fft(samples) / m
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        # split the Nyquist coefficient evenly between +-m/2
        nyq = m // 2
        coef = np.concatenate([coef, [coef[nyq] / 2]])
        coef[nyq] /= 2
        k = np.concatenate([k, [m // 2]])

    def evaluate(theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, float)
        if theta.size and np.allclose(np.diff(theta), 2 * np.pi / theta.size) and theta[0] == 0:
            M = theta.size
            if M >= m:
                spec = np.zeros(M, complex)
                spec[np.asarray(k, int) % M] += coef
                return np.fft.ifft(spec) * M
        return np.exp(1j * np.outer(theta, k)) @ coef

    return evaluate


def _node_count(curve_speed: float, distance: np.ndarray, m_min: int) -> np.ndarray:
    need = _NODES_PER_DISTANCE * 2 * np.pi * curve_speed / np.maximum(distance, 1e-300)
    m = 2 ** np.ceil(np.log2(np.maximum(need, m_min))).astype(int)
    return m


def _trapezoid(domain, data, points, powers, m_per_point, m_max):
    """Sum over components of (2 pi i)^-1 sum f(t) t' dtheta / (t - z)^p."""
    out = None
    for m in np.unique(m_per_point):
        sel = np.nonzero(m_per_point == m)[0]
        m = int(min(m, m_max))
        theta = 2 * np.pi * np.arange(m) / m
        for ci, curve in enumerate(domain.components):
            t = curve(theta)
            w = curve(theta, 1) * (2 * np.pi / m) / (2j * np.pi)
            f = np.atleast_2d(data(ci, theta))
            if out is None:
                out = np.zeros((len(powers), f.shape[0], points.size), complex)
            fw = (f * w[None, :]).T  # (m, q)
            step = max(1, _CHUNK // m)
            for s in range(0, sel.size, step):
                idx = sel[s : s + step]
                r = 1.0 / (t[None, :] - points[idx, None])
                for pi, p in enumerate(powers):
                    out[pi][:, idx] += ((r if p == 1 else r**p) @ fw).T
    return out


def cauchy_field(
    domain: DomainSpec,
    data: BoundaryData,
    points: np.ndarray,
    step: float,
    powers=(1,),
    m_min: int = 64,
    m_max: int = 2**16,
) -> np.ndarray:
    """Cauchy-type integrals ``(2 pi i)^-1 \\oint f(t) dt / (t - z)^p``.

    Parameters
    ----------
    domain : DomainSpec
        Supplies the boundary components (positively oriented).
    data : callable
        ``data(component, theta)`` returning ``(q, len(theta))`` boundary
        values; it is called with arbitrary uniform node sets, so it must be
        a closed form or an interpolant.
    points : ndarray
        Evaluation points.
    step : float
        Points whose signed distance is below ``step`` are obtained by
        extrapolation along the inward normal from ``step, 2 step, 3 step,
        4 step``.
    powers : tuple of int
        Increasing kernel powers to evaluate (1 gives the Cauchy integral,
        2 its complex derivative).

    Returns
    -------
    ndarray, shape (len(powers), q, len(points))
    """
    points = np.asarray(points, complex).ravel()
    powers = tuple(sorted(powers))
    speed = max(c.speed_max for c in domain.components)
    proj = project(domain, points)
    sd = proj.distance
    far = sd >= step
    out = None
    if far.any():
        m_far = _node_count(speed, sd[far], m_min)
        vals = _trapezoid(domain, data, points[far], powers, m_far, m_max)
        out = np.zeros(vals.shape[:2] + (points.size,), complex)
        out[:, :, far] = vals
    near = np.nonzero(~far)[0]
    if near.size:
        offsets = step * np.arange(1.0, 5.0)
        base = proj.point[near]
        nrm = proj.normal[near]
        probe = (base[None, :] + offsets[:, None] * nrm[None, :]).ravel()
        m_near = _node_count(speed, np.repeat(offsets, near.size) * 0.9, m_min)
        vals = _trapezoid(domain, data, probe, powers, m_near, m_max)
        vals = vals.reshape(vals.shape[:2] + (4, near.size))
        x = sd[near]
        lag = np.ones((4, near.size))
        for i in range(4):
            for j in range(4):
                if i != j:
                    lag[i] *= (x - offsets[j]) / (offsets[i] - offsets[j])
        ext = np.einsum("pqin,in->pqn", vals, lag)
        if out is None:
            out = np.zeros(ext.shape[:2] + (points.size,), complex)
        out[:, :, near] = ext
    return out
