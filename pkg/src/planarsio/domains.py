"""Smooth bounded domains described by trigonometric boundary curves.

Three kinds are supported: a disc, the centred annulus ``r < |z| < R`` and a
simply connected domain bounded by ``gamma(theta) = sum_k c_k exp(i k theta)``.
Every boundary component is stored as a :class:`TrigCurve`; the inner circle
of an annulus is traversed clockwise so that the domain always lies to the
left of each component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np
import shapely

from .grid import Field, GridSpec

__all__ = [
    "TrigCurve",
    "DomainSpec",
    "BoundaryComponent",
    "BoundaryGrid",
    "BoundaryTrace",
    "Projection",
    "mask_field",
    "support",
    "boundary_grid",
    "signed_distance",
    "project",
    "write_cbnd",
    "read_cbnd",
]

_POLY_NODES = 8192
_SEARCH_NODES = 512


@dataclass(frozen=True)
class TrigCurve:
    """Closed curve ``gamma(theta) = sum_k c_k exp(i k theta)``.

    Parameters
    ----------
    terms : tuple of (int, complex)
        Nonzero coefficients keyed by wavenumber.
    """

    terms: tuple

    def __call__(self, theta, der: int = 0) -> np.ndarray:
        """Evaluate the ``der``-th derivative of ``gamma`` at ``theta``."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, complex)
        for k, c in self.terms:
            out = out + c * (1j * k) ** der * np.exp(1j * k * theta)
        return out

    @property
    def degree(self) -> int:
        return max(abs(k) for k, _ in self.terms)

    @cached_property
    def speed_max(self) -> float:
        """Upper bound of ``|gamma'|`` from dense sampling."""
        th = 2 * np.pi * np.arange(4096) / 4096
        return float(np.abs(self(th, 1)).max()) * 1.01

    @cached_property
    def length(self) -> float:
        m = max(256, 8 * self.degree)
        th = 2 * np.pi * np.arange(m) / m
        return float(np.abs(self(th, 1)).mean() * 2 * np.pi)

    @cached_property
    def signed_area(self) -> float:
        m = max(256, 8 * self.degree)
        th = 2 * np.pi * np.arange(m) / m
        g = self(th)
        return float(0.5 * np.mean(np.imag(np.conj(g) * self(th, 1))) * 2 * np.pi)


@dataclass(frozen=True)
class DomainSpec:
    """A disc, a centred annulus or a trig-curve domain.

    Use the constructors :meth:`disc`, :meth:`annulus`, :meth:`curve` and
    :meth:`ellipse` rather than the raw initializer.

    Attributes
    ----------
    kind : {"disc", "annulus", "curve"}
    coeffs : tuple of complex
        Curve coefficients ordered ``k = -d .. d`` (kind ``"curve"``).
    center, radius : complex, float
        Disc parameters.
    r_inner, r_outer : float
        Annulus radii.
    """

    kind: str
    coeffs: tuple = ()
    center: complex = 0j
    radius: float = 1.0
    r_inner: float = 0.0
    r_outer: float = 0.0

    def __post_init__(self):
        if self.kind == "disc":
            if not self.radius > 0:
                raise ValueError("disc radius must be positive")
        elif self.kind == "annulus":
            if not 0 < self.r_inner < self.r_outer:
                raise ValueError("annulus requires 0 < r_inner < r_outer")
        elif self.kind == "curve":
            if len(self.coeffs) % 2 != 1 or len(self.coeffs) < 3:
                raise ValueError("curve coefficients must have odd length 2d+1 with d >= 1")
            self._check_curve(self.components[0])
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    # constructors -----------------------------------------------------
    @classmethod
    def disc(cls, center: complex = 0j, radius: float = 1.0) -> "DomainSpec":
        return cls("disc", center=complex(center), radius=float(radius))

    @classmethod
    def annulus(cls, r: float, R: float = 1.0) -> "DomainSpec":
        return cls("annulus", r_inner=float(r), r_outer=float(R))

    @classmethod
    def curve(cls, coeffs: Sequence[complex]) -> "DomainSpec":
        return cls("curve", coeffs=tuple(complex(c) for c in coeffs))

    @classmethod
    def ellipse(cls, a: float, b: float) -> "DomainSpec":
        """Ellipse ``a cos(theta) + i b sin(theta)``."""
        return cls.curve([(a - b) / 2, 0, (a + b) / 2])

    # geometry ---------------------------------------------------------
    @cached_property
    def components(self) -> tuple:
        """Boundary components, positively oriented with respect to the domain."""
        if self.kind == "disc":
            terms = ((1, complex(self.radius)),)
            if self.center != 0:
                terms = ((0, self.center),) + terms
            return (TrigCurve(terms),)
        if self.kind == "annulus":
            return (
                TrigCurve(((1, complex(self.r_outer)),)),
                TrigCurve(((-1, complex(self.r_inner)),)),
            )
        d = len(self.coeffs) // 2
        terms = tuple((k - d, c) for k, c in enumerate(self.coeffs) if c != 0)
        return (TrigCurve(terms),)

    @staticmethod
    def _check_curve(curve: TrigCurve) -> None:
        th = 2 * np.pi * np.arange(_POLY_NODES) / _POLY_NODES
        speed = np.abs(curve(th, 1))
        if speed.min() <= 1e-10 * speed.max():
            raise ValueError("degenerate curve: |gamma'| vanishes")
        ring = shapely.LinearRing(np.column_stack([curve(th).real, curve(th).imag]))
        if not ring.is_simple:
            raise ValueError("curve is not simple")
        if curve.signed_area <= 0:
            raise ValueError("curve must be counterclockwise")

    @property
    def simply_connected(self) -> bool:
        return self.kind != "annulus"

    @cached_property
    def polygon(self):
        """Dense polygonal approximation used for inside tests and area fractions."""
        th = 2 * np.pi * np.arange(_POLY_NODES) / _POLY_NODES
        rings = [np.column_stack([c(th).real, c(th).imag]) for c in self.components]
        poly = shapely.Polygon(rings[0], rings[1:])
        shapely.prepare(poly)
        return poly

    @property
    def area(self) -> float:
        return float(sum(c.signed_area for c in self.components))

    @property
    def bounding_radius(self) -> float:
        """Largest ``|z|`` on the boundary."""
        th = 2 * np.pi * np.arange(4096) / 4096
        return float(np.abs(self.components[0](th)).max())

    def inside(self, z) -> np.ndarray:
        z = np.asarray(z, complex)
        return shapely.contains_xy(self.polygon, z.real, z.imag)

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == "disc":
            return {"kind": "disc", "center": [self.center.real, self.center.imag], "radius": self.radius}
        if self.kind == "annulus":
            return {"kind": "annulus", "r": self.r_inner, "R": self.r_outer}
        return {"kind": "curve", "coeffs": [[c.real, c.imag] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "DomainSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj.get("kind")
        if kind == "disc":
            cx, cy = obj.get("center", [0.0, 0.0])
            return cls.disc(complex(cx, cy), obj.get("radius", 1.0))
        if kind == "annulus":
            return cls.annulus(obj["r"], obj.get("R", 1.0))
        if kind == "curve":
            return cls.curve([complex(re, im) for re, im in obj["coeffs"]])
        if kind == "ellipse":
            return cls.ellipse(obj["a"], obj["b"])
        raise ValueError(f"unknown domain kind {kind!r}")


@dataclass(frozen=True)
class BoundaryComponent:
    """Nodes of one boundary component at ``theta_j = 2 pi j / m``."""

    theta: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    d2gamma: np.ndarray


@dataclass(frozen=True)
class BoundaryGrid:
    """Uniform-parameter boundary nodes for every component of a domain."""

    domain: DomainSpec
    m: int
    components: tuple

    @property
    def theta(self) -> np.ndarray:
        return self.components[0].theta

    @property
    def gamma(self) -> np.ndarray:
        return self.components[0].gamma

    @property
    def dgamma(self) -> np.ndarray:
        return self.components[0].dgamma

    def sample(self, fn) -> "BoundaryTrace":
        """Trace of a pointwise function of ``z`` on every component."""
        return BoundaryTrace(tuple(np.asarray(fn(c.gamma), complex) * np.ones(self.m) for c in self.components))


@dataclass(frozen=True)
class BoundaryTrace:
    """Boundary values at the nodes of a :class:`BoundaryGrid`, one array per component."""

    values: tuple

    def __post_init__(self):
        vals = tuple(np.array(v, dtype=complex) for v in self.values)
        for v in vals:
            v.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if len({v.shape for v in vals}) > 1:
            raise ValueError("all components must have the same number of nodes")

    @property
    def m(self) -> int:
        return self.values[0].size

    def check(self, bgrid: BoundaryGrid) -> None:
        if len(self.values) != len(bgrid.components) or self.m != bgrid.m:
            raise ValueError("trace does not match the boundary grid")


def boundary_grid(domain: DomainSpec, m: int) -> BoundaryGrid:
    """Boundary nodes and derivatives from the closed-form parametrization."""
    if m < 4 or m & (m - 1):
        raise ValueError(f"m must be a power of two, got {m}")
    theta = 2 * np.pi * np.arange(m) / m
    theta.flags.writeable = False
    comps = []
    for c in domain.components:
        arrs = [c(theta, d) for d in range(3)]
        for a in arrs:
            a.flags.writeable = False
        comps.append(BoundaryComponent(theta, *arrs))
    return BoundaryGrid(domain, m, tuple(comps))


@dataclass(frozen=True)
class Projection:
    """Nearest boundary points of a set of query points."""

    component: np.ndarray
    theta: np.ndarray
    point: np.ndarray
    normal: np.ndarray  # unit normal pointing into the domain
    distance: np.ndarray  # signed: positive inside


def _coarse_search(curve: TrigCurve, z: np.ndarray, nodes: int):
    th0 = 2 * np.pi * np.arange(nodes) / nodes
    g = curve(th0)
    best = np.empty(z.size, int)
    dist = np.empty(z.size)
    step = max(1, 2**22 // nodes)
    for s in range(0, z.size, step):
        d = np.abs(z[s : s + step, None] - g[None, :])
        best[s : s + step] = d.argmin(axis=1)
        dist[s : s + step] = d.min(axis=1)
    return th0[best], dist


def _project_curve(curve: TrigCurve, z: np.ndarray):
    th, coarse = _coarse_search(curve, z, _SEARCH_NODES)
    dth = 2 * np.pi / _SEARCH_NODES
    th0 = th.copy()
    converged = np.zeros(z.size, bool)
    for _ in range(40):
        d0 = curve(th) - z
        d1 = curve(th, 1)
        d2 = curve(th, 2)
        g = np.real(np.conj(d0) * d1)
        H = np.abs(d1) ** 2 + np.real(np.conj(d0) * d2)
        step = np.where(H > 0, g / np.where(H > 0, H, 1.0), np.sign(g) * dth)
        step = np.clip(step, -dth, dth)
        th = th - step
        converged = np.abs(step) < 1e-14
        if converged.all():
            break
    p = curve(th)
    dist = np.abs(p - z)
    bad = ~converged | (np.abs(th - th0) > 2 * dth) | (dist > coarse + 1e-12)
    if bad.any():
        th[bad] = _dense_minimum(curve, z[bad])
        p = curve(th)
        dist = np.abs(p - z)
    return th, p, dist


def _dense_minimum(curve: TrigCurve, z: np.ndarray) -> np.ndarray:
    nodes = 16 * _SEARCH_NODES
    th, _ = _coarse_search(curve, z, nodes)
    dth = 2 * np.pi / nodes
    # parabolic refinement of the squared distance around the best node
    f = [np.abs(curve(th + s * dth) - z) ** 2 for s in (-1, 0, 1)]
    denom = f[0] - 2 * f[1] + f[2]
    shift = np.where(denom > 0, 0.5 * (f[0] - f[2]) / np.where(denom > 0, denom, 1.0), 0.0)
    return th + np.clip(shift, -1, 1) * dth


def project(domain: DomainSpec, z) -> Projection:
    """Project points onto the nearest boundary component by Newton iteration.

    Falls back to a dense-sampling minimum wherever Newton fails.
    """
    z = np.atleast_1d(np.asarray(z, complex)).ravel()
    best = None
    for idx, curve in enumerate(domain.components):
        th, p, dist = _project_curve(curve, z)
        if best is None:
            best = [np.zeros(z.size, int), th, p, dist]
        else:
            closer = dist < best[3]
            best[0][closer] = idx
            best[1][closer] = th[closer]
            best[2][closer] = p[closer]
            best[3][closer] = dist[closer]
    comp, th, p, _ = best
    tangent = np.empty(z.size, complex)
    for idx, curve in enumerate(domain.components):
        sel = comp == idx
        tangent[sel] = curve(th[sel], 1)
    normal = 1j * tangent / np.abs(tangent)
    sd = np.real(np.conj(z - p) * normal)
    return Projection(comp, th, p, normal, sd)


def signed_distance(domain: DomainSpec, z):
    """Distance to the boundary, positive inside and negative outside.

    Returns a float for scalar input and an array otherwise.
    """
    scalar = np.ndim(z) == 0
    sd = project(domain, z).distance
    return float(sd[0]) if scalar else sd.reshape(np.shape(z))


@lru_cache(maxsize=16)
def _boundary_pieces(domain: DomainSpec, spec: GridSpec):
    """Cells near the boundary and their intersections with the domain polygon.

    Returns the row and column indices of a band of cells around the
    boundary and, for each, the clipped geometry ``cell & polygon``.
    """
    h, l, n = spec.h, spec.l, spec.n
    reach = domain.bounding_radius
    if domain.kind == "disc":
        reach = abs(domain.center) + domain.radius
    if reach > l - 2 * h:
        raise ValueError(f"domain (radius {reach:.4g}) exceeds the grid square minus a 2h margin (l={l})")
    corners = -l - h / 2 + h * np.arange(n + 1)
    cx, cy = np.meshgrid(corners, corners)
    cin = shapely.contains_xy(domain.polygon, cx, cy)
    mixed = (cin[:-1, :-1] != cin[1:, :-1]) | (cin[:-1, :-1] != cin[:-1, 1:]) | (cin[:-1, :-1] != cin[1:, 1:])
    band = mixed.copy()
    for ax in (0, 1):
        band |= np.roll(mixed, 1, ax) | np.roll(mixed, -1, ax)
    band |= np.roll(band, 1, 0) | np.roll(band, -1, 0)
    z = spec.z
    jj, kk = np.nonzero(band)
    pieces = np.empty(jj.size, dtype=object)
    # Clip the polygon to tiles first so each cell meets only a few vertices.
    tile = 8
    tid = (jj // tile) * (n // tile + 1) + kk // tile
    order = np.argsort(tid, kind="stable")
    starts = np.flatnonzero(np.r_[True, np.diff(tid[order]) != 0])
    for a, b in zip(starts, np.r_[starts[1:], order.size]):
        sel = order[a:b]
        j0, k0 = (jj[sel[0]] // tile) * tile, (kk[sel[0]] // tile) * tile
        x0 = -l + (k0 - 1) * h
        y0 = -l + (j0 - 1) * h
        piece = shapely.clip_by_rect(domain.polygon, x0, y0, x0 + (tile + 2) * h, y0 + (tile + 2) * h)
        x = z.real[jj[sel], kk[sel]]
        y = z.imag[jj[sel], kk[sel]]
        boxes = shapely.box(x - h / 2, y - h / 2, x + h / 2, y + h / 2)
        pieces[sel] = shapely.intersection(boxes, piece)
    return jj, kk, pieces


@lru_cache(maxsize=32)
def _mask_values(domain: DomainSpec, spec: GridSpec) -> np.ndarray:
    z = spec.z
    mask = shapely.contains_xy(domain.polygon, z.real, z.imag).astype(float)
    jj, kk, pieces = _boundary_pieces(domain, spec)
    frac = np.clip(shapely.area(pieces) / spec.h**2, 0.0, 1.0)
    frac[frac > 1 - 1e-12] = 1.0
    frac[frac < 1e-14] = 0.0
    mask[jj, kk] = frac
    mask.flags.writeable = False
    return mask


def mask_field(domain: DomainSpec, spec: GridSpec) -> Field:
    """Cell area fractions of the domain.

    Cells entirely inside get exactly 1 and cells entirely outside exactly 0.
    Cells near the boundary get the exact area of their intersection with a
    dense polygonal approximation of the domain, divided by ``h^2``.
    """
    return Field(spec, _mask_values(domain, spec))


def support(domain: DomainSpec, spec: GridSpec) -> np.ndarray:
    """Boolean array of cells that meet the domain (``mask > 0``)."""
    return mask_field(domain, spec).values.real > 0


def write_cbnd(path, trace: BoundaryTrace) -> None:
    """Write one ``.cbnd`` record (JSON header line + c128le data) per component."""
    with open(Path(path), "wb") as fh:
        for idx, vals in enumerate(trace.values):
            header = {"magic": "CBND", "m": int(vals.size), "component": idx}
            fh.write(json.dumps(header, separators=(",", ":")).encode("utf-8") + b"\n")
            fh.write(np.ascontiguousarray(vals, dtype="<c16").tobytes())


def read_cbnd(path) -> BoundaryTrace:
    """Read a ``.cbnd`` file written by :func:`write_cbnd`."""
    raw = Path(path).read_bytes()
    pos, comps = 0, []
    while pos < len(raw):
        nl = raw.find(b"\n", pos)
        if nl < 0:
            raise ValueError("truncated .cbnd header")
        header = json.loads(raw[pos:nl].decode("utf-8"))
        if header.get("magic") != "CBND":
            raise ValueError("not a CBND file")
        m = int(header["m"])
        body = raw[nl + 1 : nl + 1 + 16 * m]
        if len(body) != 16 * m:
            raise ValueError("truncated .cbnd data")
        comps.append(np.frombuffer(body, dtype="<c16").astype(complex))
        pos = nl + 1 + 16 * m
    if not comps:
        raise ValueError("empty .cbnd file")
    return BoundaryTrace(tuple(comps))
