"""Fixed-point solvers for first-order elliptic systems in the plane.

The systems have the form

    f_zbar = a f_z + b conj(f_z) + c            (m x m coefficient fields)

on a bounded domain, with either a Dirichlet condition ``Re f = f0`` on the
unit circle or the Cauchy condition ``K f = K f0``.  Writing ``u = g_z`` for
the part ``g`` of ``f`` that carries the homogeneous condition turns each
problem into ``u = S(a u + b conj(u) + c~)`` with ``S`` an L2 isometry, so
plain iteration contracts at rate ``sup(|a| + |b|)``.

Vector data are stacked arrays: coefficients ``(m, m, n, n)`` and unknowns
``(m, n, n)``.  Scalar problems accept and return :class:`Field` objects.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable

import numpy as np

from .beltrami import EllipticityError, NoConvergence
from .disc_ops import UNIT_DISC, s1, schwarz_extension, t1
from .domain_ops import cauchy_extension, s_omega, t_omega
from .domains import BoundaryGrid, BoundaryTrace, DomainSpec, boundary_grid, mask_field, support
from .grid import Field, GridSpec

__all__ = [
    "DirichletRe",
    "CauchyK",
    "EllipticProblem",
    "SolveReport",
    "Unsupported",
    "NoConvergence",
    "EllipticityError",
    "solve_inteq_S",
    "solve_inteq_S1",
    "solve_dirichlet_disc",
    "solve_cauchy_bvp",
    "make_manufactured",
]


class Unsupported(ValueError):
    """The requested problem lies outside what the solvers handle."""


@dataclass(frozen=True)
class DirichletRe:
    """``Re f = f0`` on the boundary; one real trace per system component."""

    bgrid: BoundaryGrid
    f0: tuple


@dataclass(frozen=True)
class CauchyK:
    """``K f = K f0`` on the boundary; ``f0 = None`` means homogeneous data."""

    bgrid: BoundaryGrid | None = None
    f0: tuple | None = None


@dataclass
class SolveReport:
    """Diagnostics of a fixed-point solve.

    Attributes
    ----------
    iterations : int
    residual_history : list of float
        Relative l2 size of successive differences.
    final_equation_residual : float
        l2 norm of ``f_zbar - a f_z - b conj(f_z) - c`` on interior cells
        (``u - S(...) - b`` for the integral equations).
    equation_scale : float
        l2 norm of the terms of that equation, for normalization.
    bc_residual : float
        Boundary-condition defect (problem specific, 0 if none).
    converged : bool
    """

    iterations: int = 0
    residual_history: list = dc_field(default_factory=list)
    final_equation_residual: float = float("nan")
    equation_scale: float = float("nan")
    bc_residual: float = 0.0
    bc_scale: float = 1.0
    converged: bool = False
    contraction_bound: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# -- stacking helpers -------------------------------------------------------


def _spec_of(*objs) -> GridSpec:
    for o in objs:
        if isinstance(o, Field):
            return o.spec
        if isinstance(o, (list, tuple)):
            for x in o:
                s = _spec_of(x)
                if s is not None:
                    return s
    return None


def _scalar_values(x, spec: GridSpec) -> np.ndarray:
    if isinstance(x, Field):
        if x.spec != spec:
            raise ValueError("all fields must share one grid")
        return x.values
    return np.full((spec.n, spec.n), complex(x))


def _as_vector(x, m: int, spec: GridSpec) -> np.ndarray:
    """Stack ``m`` components; a single number or Field is repeated."""
    if isinstance(x, np.ndarray) and x.shape == (m, spec.n, spec.n):
        return x.astype(complex)
    if not isinstance(x, (list, tuple)):
        return np.repeat(_scalar_values(x, spec)[None], m, axis=0)
    if len(x) != m:
        raise ValueError(f"expected {m} components")
    return np.stack([_scalar_values(xi, spec) for xi in x])


def _as_matrix(x, m: int, spec: GridSpec) -> np.ndarray:
    """Stack an ``m x m`` matrix; a single number or Field ``x`` means ``x I``."""
    if isinstance(x, np.ndarray) and x.shape == (m, m, spec.n, spec.n):
        return x.astype(complex)
    if not isinstance(x, (list, tuple)):
        out = np.zeros((m, m, spec.n, spec.n), complex)
        out[np.arange(m), np.arange(m)] = _scalar_values(x, spec)
        return out
    if len(x) != m or any(len(row) != m for row in x):
        raise ValueError(f"expected an {m}x{m} matrix of fields")
    return np.stack([np.stack([_scalar_values(e, spec) for e in row]) for row in x])


def _matvec(A: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("ijyx,jyx->iyx", A, u)


def _pointwise_opnorm(A: np.ndarray) -> np.ndarray:
    m = A.shape[0]
    if m == 1:
        return np.abs(A[0, 0])
    mats = np.moveaxis(A, (0, 1), (2, 3))
    return np.linalg.norm(mats, ord=2, axis=(2, 3))


def _unstack(u: np.ndarray, spec: GridSpec, scalar: bool):
    fields = tuple(Field(spec, ui) for ui in u)
    return fields[0] if scalar else fields


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    """``f_zbar = a f_z + b conj(f_z) + c`` on ``domain`` with a boundary condition.

    Build instances with :meth:`build`, which accepts Fields, numbers or
    nested lists of them.

    Attributes
    ----------
    m : int
        System size.
    coeff_a, coeff_b : ndarray, shape (m, m, n, n)
    rhs_c : ndarray, shape (m, n, n)
    spec : GridSpec
    domain : DomainSpec
    bc : DirichletRe, CauchyK or None
    a0 : float
        ``sup_z (||a(z)|| + ||b(z)||)`` over the domain cells.
    """

    m: int
    coeff_a: np.ndarray
    coeff_b: np.ndarray
    rhs_c: np.ndarray
    spec: GridSpec
    domain: DomainSpec
    bc: object = None
    a0: float = 0.0

    @classmethod
    def build(cls, domain: DomainSpec, a, b, c, bc=None, spec: GridSpec | None = None, m: int | None = None):
        spec = spec or _spec_of(a, b, c)
        if spec is None:
            raise ValueError("a GridSpec is needed when no coefficient is a Field")
        if m is None:
            m = len(c) if isinstance(c, (list, tuple)) else 1
        A = _as_matrix(a, m, spec)
        B = _as_matrix(b, m, spec)
        C = _as_vector(c, m, spec)
        supp = support(domain, spec)
        na = _pointwise_opnorm(A)[supp]
        nb = _pointwise_opnorm(B)[supp]
        a0 = float((na + nb).max()) if na.size else 0.0
        if m == 1 and a0 >= 1:
            raise EllipticityError(f"ellipticity violated: sup(|a| + |b|) = {a0:.4g} >= 1")
        if m > 1 and nb.size and nb.max() >= 1:
            raise EllipticityError(f"ellipticity violated: sup ||b|| = {nb.max():.4g} >= 1")
        return cls(m, A, B, C, spec, domain, bc, a0)

    @property
    def scalar(self) -> bool:
        return self.m == 1


# -- fixed-point driver -------------------------------------------------------


def _stack_norm(u: np.ndarray, weight: np.ndarray, h: float) -> float:
    return float(h * np.sqrt(np.sum(weight * np.abs(u) ** 2)))


def _iterate(step: Callable[[np.ndarray], np.ndarray], u0: np.ndarray, weight, h, tol, maxiter, report: SolveReport):
    u = u0
    best = np.inf
    for k in range(1, maxiter + 1):
        new = step(u)
        diff = _stack_norm(new - u, weight, h)
        size = _stack_norm(new, weight, h)
        rel = diff / size if size > 0 else 0.0
        report.iterations = k
        report.residual_history.append(rel)
        u = new
        if not np.isfinite(diff) or diff > 1e8 * max(best, 1e-300) or size > 1e12:
            report.converged = False
            raise NoConvergence(f"iteration diverged after {k} steps", report.residual_history, report)
        best = min(best, diff) if diff > 0 else best
        if rel <= tol:
            report.converged = True
            return u
    report.converged = False
    raise NoConvergence(f"no convergence in {maxiter} iterations", report.residual_history, report)


def _apply_op(op, u: np.ndarray, spec: GridSpec) -> np.ndarray:
    return np.stack([op(Field(spec, ui)).values for ui in u])


# -- integral equations -------------------------------------------------------


def _inteq(op, A, b, domain, tol, maxiter):
    spec = _spec_of(A, b)
    if spec is None:
        raise ValueError("A or b must be a Field")
    scalar = isinstance(b, Field)
    m = 1 if scalar else len(b)
    Am = _as_matrix(A, m, spec)
    bv = _as_vector(b, m, spec)
    supp = support(domain, spec)
    bv = np.where(supp, bv, 0)
    anorm = float(_pointwise_opnorm(Am)[supp].max())
    if anorm >= 1:
        raise EllipticityError(f"||A||_inf = {anorm:.4g} must be < 1")
    weight = mask_field(domain, spec).values.real
    report = SolveReport(contraction_bound=anorm)

    def step(u):
        return _apply_op(op, _matvec(Am, np.conj(u)), spec) + bv

    u = _iterate(step, bv, weight, spec.h, tol, maxiter, report)
    res = u - step(u)
    report.final_equation_residual = _stack_norm(res, weight, spec.h)
    report.equation_scale = _stack_norm(u, weight, spec.h)
    return _unstack(u, spec, scalar), report


def solve_inteq_S(A, b, domain: DomainSpec, tol: float = 1e-10, maxiter: int = 500, backend="convolution"):
    """Solve ``u = S_Omega(A conj(u)) + b`` by fixed-point iteration.

    Parameters
    ----------
    A : Field or m x m nested list of Fields
    b : Field or list of m Fields

    Returns
    -------
    u : Field or tuple of Field
    report : SolveReport
    """
    return _inteq(lambda f: s_omega(f, domain, backend), A, b, domain, tol, maxiter)


def solve_inteq_S1(A, b, tol: float = 1e-10, maxiter: int = 500, backend="convolution", degree: int = 32):
    """Solve ``u = S1(A conj(u)) + b`` on the unit disc."""
    return _inteq(lambda f: s1(f, backend, degree), A, b, UNIT_DISC, tol, maxiter)


# -- residual diagnostics --------------------------------------------------


def _fd_gradient(f: np.ndarray, h: float):
    """Fourth-order central differences ``(f_z, f_zbar)`` (valid two cells from the edge of the data)."""
    def d(ax):
        return (8 * (np.roll(f, -1, ax) - np.roll(f, 1, ax)) - (np.roll(f, -2, ax) - np.roll(f, 2, ax))) / (12 * h)

    fx, fy = d(-1), d(-2)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def _interior(domain: DomainSpec, spec: GridSpec, cells: int = 3) -> np.ndarray:
    inside = mask_field(domain, spec).values.real >= 1.0
    core = inside.copy()
    for ax in (0, 1):
        for s in range(1, cells + 1):
            core &= np.roll(inside, s, ax) & np.roll(inside, -s, ax)
    return core


def _equation_residual(f, A, B, C, domain, spec):
    fz, fzb = _fd_gradient(f, spec.h)
    core = _interior(domain, spec).astype(float)
    r = fzb - _matvec(A, fz) - _matvec(B, np.conj(fz)) - C
    scale = _stack_norm(fz, core, spec.h) + _stack_norm(fzb, core, spec.h) + _stack_norm(C, core, spec.h)
    return _stack_norm(r, core, spec.h), scale


def _local_cubic(values: np.ndarray, spec: GridSpec, pts: np.ndarray) -> np.ndarray:
    """Tensor cubic Lagrange interpolation on the 4x4 stencil around each point."""
    x = (pts.real + spec.l) / spec.h
    y = (pts.imag + spec.l) / spec.h
    i0 = np.floor(x).astype(int) - 1
    j0 = np.floor(y).astype(int) - 1
    nodes = np.arange(4)

    def weights(t):
        w = np.ones(t.shape + (4,))
        for a in range(4):
            for b in range(4):
                if a != b:
                    w[..., a] *= (t - b) / (a - b)
        return w

    wx = weights(x - i0)
    wy = weights(y - j0)
    rows = np.clip(j0[:, None] + nodes, 0, spec.n - 1)
    cols = np.clip(i0[:, None] + nodes, 0, spec.n - 1)
    patch = values[rows[:, :, None], cols[:, None, :]]
    return np.einsum("pa,pb,pab->p", wy, wx, patch)


def _boundary_values(f: np.ndarray, spec: GridSpec, bgrid: BoundaryGrid) -> np.ndarray:
    """Interior limits of ``f`` at the boundary nodes by normal extrapolation.

    ``f`` is interpolated with cubic stencils at depths 4h, 6h and 8h along the
    inward normal and extrapolated quadratically to depth 0.
    """
    comp = bgrid.components[0]
    nrm = 1j * comp.dgamma / np.abs(comp.dgamma)
    depths = spec.h * np.array([4.0, 6.0, 8.0])
    samples = [_local_cubic(f, spec, comp.gamma + s * nrm) for s in depths]
    lag = []
    for i in range(3):
        w = 1.0
        for j in range(3):
            if i != j:
                w *= (0.0 - depths[j]) / (depths[i] - depths[j])
        lag.append(w)
    return sum(w * s for w, s in zip(lag, samples))


# -- boundary-value problems ---------------------------------------------------


def solve_dirichlet_disc(problem: EllipticProblem, tol: float = 1e-10, maxiter: int = 500, backend="convolution", degree: int = 32):
    """Solve ``f_zbar = a f_z + b conj(f_z) + c`` on the unit disc with ``Re f = f0`` on the circle.

    ``f = f1 + T1(a u + b conj(u) + c~)`` where ``f1`` is the Schwarz
    extension of ``f0``, ``c~ = c + a f1' + b conj(f1')`` and ``u`` solves
    ``u = S1(a u + b conj(u) + c~)``.  The gauge ``Im f1(0) = 0`` fixes the
    free imaginary constant.

    Returns
    -------
    f : Field or tuple of Field
    report : SolveReport

    Raises
    ------
    Unsupported
        For a non-disc domain or a vector system with ``a != 0``.
    NoConvergence
    """
    if problem.domain != UNIT_DISC:
        raise Unsupported("the Dirichlet solver works on the unit disc only")
    if not isinstance(problem.bc, DirichletRe):
        raise Unsupported("problem needs a DirichletRe boundary condition")
    if problem.m > 1 and np.any(problem.coeff_a != 0):
        raise Unsupported("vector Dirichlet problems are supported only for a = 0")
    spec, m = problem.spec, problem.m
    A, B, C = problem.coeff_a, problem.coeff_b, problem.rhs_c
    if len(problem.bc.f0) != m:
        raise ValueError("need one boundary trace per component")
    f1, df1 = [], []
    for tr in problem.bc.f0:
        e, de = schwarz_extension(tr, spec, derivative=True)
        f1.append(e.values)
        df1.append(de.values)
    f1, df1 = np.stack(f1), np.stack(df1)
    ct = C + _matvec(A, df1) + _matvec(B, np.conj(df1))
    supp = support(UNIT_DISC, spec)
    ct = np.where(supp, ct, 0)
    weight = mask_field(UNIT_DISC, spec).values.real
    report = SolveReport(contraction_bound=problem.a0)

    def density(u):
        return _matvec(A, u) + _matvec(B, np.conj(u)) + ct

    def step(u):
        return _apply_op(lambda f: s1(f, backend, degree), density(u), spec)

    u = _iterate(step, np.zeros_like(ct), weight, spec.h, tol, maxiter, report)
    g = _apply_op(lambda f: t1(f, degree), density(u), spec)
    f = g + f1
    report.final_equation_residual, report.equation_scale = _equation_residual(f, A, B, C, UNIT_DISC, spec)
    bgrid = problem.bc.bgrid
    worst, scale = 0.0, 0.0
    for fi, tr in zip(f, problem.bc.f0):
        vals = _boundary_values(fi, spec, bgrid)
        worst = max(worst, float(np.abs(vals.real - tr.values[0].real).max()))
        scale = max(scale, float(np.abs(tr.values[0]).max()))
    report.bc_residual, report.bc_scale = worst, scale
    return _unstack(f, spec, problem.scalar), report


def solve_cauchy_bvp(problem: EllipticProblem, tol: float = 1e-10, maxiter: int = 500, backend="convolution"):
    """Solve ``f_zbar = A1 f_z + A2 conj(f_z) + c`` with ``K f = K f0``.

    ``f = h0 + T_Omega(A1 u + A2 conj(u) + c~)`` with ``h0 = K f0``,
    ``c~ = c + A1 h0' + A2 conj(h0')`` and ``u = S_Omega(A1 u + A2 conj(u) + c~)``.
    ``bc_residual`` reports the l2 size of
    ``dbar(f - T_Omega(A1 f_z + A2 conj(f_z) + c))`` on interior cells,
    which vanishes exactly when ``f`` differs from a holomorphic function by
    the Cauchy-Green term.

    Raises
    ------
    NoConvergence
        When the iteration stalls or diverges (for instance a large ``A1`` in
        a vector system).
    """
    if not isinstance(problem.bc, CauchyK):
        raise Unsupported("problem needs a CauchyK boundary condition")
    spec, m, domain = problem.spec, problem.m, problem.domain
    A, B, C = problem.coeff_a, problem.coeff_b, problem.rhs_c
    h0 = np.zeros((m, spec.n, spec.n), complex)
    dh0 = np.zeros_like(h0)
    if problem.bc.f0 is not None:
        if len(problem.bc.f0) != m:
            raise ValueError("need one boundary trace per component")
        for i, tr in enumerate(problem.bc.f0):
            e, de = cauchy_extension(tr, problem.bc.bgrid, spec, derivative=True)
            h0[i], dh0[i] = e.values, de.values
    supp = support(domain, spec)
    ct = np.where(supp, C + _matvec(A, dh0) + _matvec(B, np.conj(dh0)), 0)
    weight = mask_field(domain, spec).values.real
    report = SolveReport(contraction_bound=problem.a0)

    def density(u):
        return _matvec(A, u) + _matvec(B, np.conj(u)) + ct

    def step(u):
        return _apply_op(lambda f: s_omega(f, domain, backend), density(u), spec)

    u = _iterate(step, np.zeros_like(ct), weight, spec.h, tol, maxiter, report)
    f = h0 + _apply_op(lambda g: t_omega(g, domain), density(u), spec)
    report.final_equation_residual, report.equation_scale = _equation_residual(f, A, B, C, domain, spec)
    fz, _ = _fd_gradient(f, spec.h)
    rep = _apply_op(lambda g: t_omega(g, domain), _matvec(A, fz) + _matvec(B, np.conj(fz)) + C, spec)
    _, hol_zb = _fd_gradient(f - rep, spec.h)
    core = _interior(domain, spec, cells=5).astype(float)
    report.bc_residual = _stack_norm(hol_zb, core, spec.h)
    report.bc_scale = _stack_norm(_fd_gradient(f, spec.h)[1], core, spec.h) + _stack_norm(fz, core, spec.h)
    return _unstack(f, spec, problem.scalar), report


# -- manufactured problems ---------------------------------------------------


def _wirtinger_fd(f, z, shape, step: float = 2e-3):
    """``f_z`` and ``f_zbar`` of a smooth sampler by fourth-order central differences."""

    def along(e):
        with np.errstate(all="ignore"):
            g = lambda t: np.asarray(f(z + t * step * e), complex).reshape(shape)  # noqa: E731
            return (8 * (g(1) - g(-1)) - (g(2) - g(-2))) / (12 * step)

    fx, fy = along(1.0), along(1j)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def make_manufactured(
    domain: DomainSpec,
    coefficients,
    f_star: Callable[[np.ndarray], np.ndarray],
    bc_kind: str,
    spec: GridSpec,
    m_boundary: int = 256,
    derivatives: tuple | None = None,
):
    """Problem data for a chosen exact solution ``f_star``.

    Parameters
    ----------
    domain : DomainSpec
    coefficients : (a, b)
        Scalars, Fields or m x m nested lists.
    f_star : callable
        ``f_star(z)`` returning shape ``z.shape`` (scalar) or ``(m,) + z.shape``.
    bc_kind : {"dirichlet", "cauchy", "none"}
    spec : GridSpec
    m_boundary : int
        Boundary nodes for the trace.
    derivatives : (callable, callable), optional
        Exact ``f_z`` and ``f_zbar`` samplers.  By default fourth-order
        central differences of ``f_star`` with step ``2e-3`` are used, so
        ``f_star`` must be smooth on a neighbourhood of the domain.

    Returns
    -------
    problem : EllipticProblem
    exact : Field or tuple of Field
    """
    z = spec.z
    with np.errstate(all="ignore"):
        F = np.asarray(f_star(z), complex)
    scalar = F.shape == z.shape
    if scalar:
        F = F[None]
    if not np.all(np.isfinite(F)):
        raise ValueError("f_star produced non-finite samples")
    m = F.shape[0]
    if derivatives is None:
        Fz, Fzb = _wirtinger_fd(f_star, z, F.shape)
    else:
        Fz = np.asarray(derivatives[0](z), complex).reshape(F.shape)
        Fzb = np.asarray(derivatives[1](z), complex).reshape(F.shape)
    a, b = coefficients
    A = _as_matrix(a, m, spec)
    B = _as_matrix(b, m, spec)
    C = Fzb - _matvec(A, Fz) - _matvec(B, np.conj(Fz))
    supp = support(domain, spec)
    C = np.where(supp, C, 0)
    bgrid = boundary_grid(domain, m_boundary)
    traces = []
    for i in range(m):
        vals = []
        for comp in bgrid.components:
            v = np.asarray(f_star(comp.gamma), complex)
            vals.append(v if scalar else v[i])
        traces.append(vals)
    if bc_kind == "dirichlet":
        bc = DirichletRe(bgrid, tuple(BoundaryTrace(tuple(np.real(v) for v in vals)) for vals in traces))
    elif bc_kind == "cauchy":
        bc = CauchyK(bgrid, tuple(BoundaryTrace(tuple(vals)) for vals in traces))
    elif bc_kind == "none":
        bc = None
    else:
        raise ValueError(f"unknown bc_kind {bc_kind!r}")
    problem = EllipticProblem.build(domain, A, B, C, bc=bc, spec=spec, m=m)
    exact = np.where(supp, F, 0)
    return problem, _unstack(exact, spec, scalar)
