"""Command-line front end.

Subcommands: ``apply``, ``solve``, ``bergman compare``, ``beltrami`` and
``verify``.  Runs are described by a JSON configuration validated against
``schema/run_config.schema.json``.  Each command writes its field output
(``.cfld`` or ``.cbnd``), a JSON report next to it, optional PGM heatmaps,
and prints a tab-delimited summary on stdout.

Exit codes: 0 success, 1 verification failure, 2 configuration error or
unsupported problem, 3 numerical error, 4 no convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .beltrami import EllipticityError, NoConvergence, normal_solution, select_mu
from .bergman import b_n, b_omega, compare
from .disc_ops import UNIT_DISC, bergman_disc, s1, t1
from .domain_ops import cauchy_extension, kerzman_stein_P, s_omega, t_omega
from .domains import BoundaryTrace, DomainSpec, boundary_grid, read_cbnd, write_cbnd
from .grid import Field, GridSpec, norms, write_cfld
from .plane_ops import beurling, cauchy_green, commutator_S, conj_op
from .samplers import TagError, field_from_tag, parse_tag
from .solvers import (
    CauchyK,
    DirichletRe,
    EllipticProblem,
    SolveReport,
    Unsupported,
    solve_cauchy_bvp,
    solve_dirichlet_disc,
    solve_inteq_S,
    solve_inteq_S1,
)
from .verify import SUITES, run_suite

__all__ = ["main", "load_config", "write_heatmap", "ConfigError", "EXIT"]

EXIT = {"ok": 0, "verify": 1, "config": 2, "numerical": 3, "noconv": 4}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# -- configuration ------------------------------------------------------------


def _schema() -> dict:
    text = resources.files("planarsio").joinpath("schema/run_config.schema.json").read_text()
    return json.loads(text)


def load_config(path) -> tuple[dict, Path]:
    """Read and validate a configuration file; returns the config and its directory."""
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    return cfg, path.parent


def config_hash(cfg: dict, overrides: dict) -> str:
    blob = json.dumps({"config": cfg, "overrides": overrides}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class Run:
    """Parsed configuration plus command-line overrides."""

    def __init__(self, cfg: dict, base: Path, args):
        self.cfg = cfg
        self.base = base
        self.backend = args.backend or cfg.get("backend")
        self.seed = args.seed if args.seed is not None else cfg.get("seed", 42)
        try:
            self.spec = GridSpec(cfg["grid"]["n"], cfg["grid"]["l"])
            self.domain = DomainSpec.from_json(cfg["domain"]) if "domain" in cfg else None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.hash = config_hash(cfg, {"backend": self.backend, "seed": self.seed})

    def need(self, key: str) -> dict:
        if key not in self.cfg:
            raise ConfigError(f"config needs a '{key}' block for this command")
        return self.cfg[key]

    def need_domain(self) -> DomainSpec:
        if self.domain is None:
            raise ConfigError("config needs a 'domain' block for this operation")
        return self.domain

    def field(self, tag) -> Field:
        return field_from_tag(tag, self.spec, self.base)

    def backend_or(self, default: str) -> str:
        return self.backend or default

    def vector(self, spec, m: int):
        if isinstance(spec, list):
            if len(spec) != m:
                raise ConfigError(f"expected {m} components, got {len(spec)}")
            return [self.field(x) for x in spec]
        f = self.field(spec)
        return f if m == 1 else [f] * m

    def matrix(self, spec, m: int):
        if isinstance(spec, list):
            if len(spec) != m or any(not isinstance(r, list) or len(r) != m for r in spec):
                raise ConfigError(f"expected an {m}x{m} matrix")
            return [[self.field(x) for x in row] for row in spec]
        f = self.field(spec)
        if m == 1:
            return f
        zero = Field.zeros(self.spec)
        return [[f if i == j else zero for j in range(m)] for i in range(m)]

    def traces(self, spec: dict, domain: DomainSpec, m: int):
        """Boundary traces from a trace block; returns (bgrid, list of traces)."""
        if "file" in spec:
            files = spec["file"] if isinstance(spec["file"], list) else [spec["file"]]
            trs = [read_cbnd(self._path(f)) for f in files]
            bgrid = boundary_grid(domain, trs[0].m)
        else:
            bgrid = boundary_grid(domain, spec.get("m", 256))
            exprs = spec["expr"] if isinstance(spec["expr"], list) else [spec["expr"]]
            trs = [bgrid.sample(self._sampler(e)) for e in exprs]
        if len(trs) == 1 and m > 1:
            trs = trs * m
        if len(trs) != m:
            raise ConfigError(f"expected {m} boundary traces, got {len(trs)}")
        for tr in trs:
            tr.check(bgrid)
        return bgrid, trs

    def _sampler(self, expr):
        if isinstance(expr, (int, float)):
            return lambda z: np.full(np.shape(z), complex(expr))
        return parse_tag(expr)

    def _path(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base / p


# -- output -----------------------------------------------------------------------


def write_heatmap(path, u: Field) -> dict:
    """8-bit binary PGM of ``|u|`` scaled linearly to 0..255, with a JSON sidecar.

    Row 0 of the image is the top (largest y) row of the grid.
    """
    path = Path(path)
    mag = np.abs(u.values)[::-1]
    lo, hi = float(mag.min()), float(mag.max())
    scaled = np.zeros(mag.shape) if hi == lo else (mag - lo) / (hi - lo)
    img = np.round(255 * scaled).astype(np.uint8)
    n = img.shape[0]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
    meta = {"image": path.name, "quantity": "abs", "min": lo, "max": hi, "n": u.spec.n, "l": u.spec.l}
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    return meta


def _component_paths(out: Path, count: int) -> list[Path]:
    if count == 1:
        return [out]
    return [out.with_name(f"{out.stem}_{i}{out.suffix}") for i in range(count)]


def _write_fields(out: Path, fields, heatmap: bool) -> list[str]:
    fields = list(fields) if isinstance(fields, (list, tuple)) else [fields]
    written = []
    for path, f in zip(_component_paths(out, len(fields)), fields):
        path.parent.mkdir(parents=True, exist_ok=True)
        write_cfld(path, f)
        written.append(str(path))
        if heatmap:
            pgm = path.with_suffix(".pgm")
            write_heatmap(pgm, f)
            written.append(str(pgm))
    return written


def _report_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix != ".json" else out.with_name(out.stem + ".report.json")


def _write_report(path: Path, report: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _base_report(run: Run, command: str) -> dict:
    return {"command": command, "version": __version__, "config_hash": run.hash, "seed": run.seed, "backend": run.backend}


def _summary(pairs: dict) -> None:
    for k, v in pairs.items():
        if isinstance(v, float):
            v = f"{v:.6e}"
        print(f"{k}\t{v}")


def _field_norms(u: Field, run: Run) -> dict:
    l2, linf = norms(u)
    return {"l2": l2, "linf": linf}


# -- commands ---------------------------------------------------------------------


def cmd_apply(run: Run, out: Path, heatmap: bool) -> int:
    """Apply one operator to an input field (or boundary trace)."""
    op = run.need("operation")
    name = op["op"]
    report = _base_report(run, "apply")
    report["operation"] = name
    if name in ("K", "P"):
        domain = run.need_domain()
        if "trace" not in op:
            raise ConfigError(f"operator {name} needs a 'trace' block")
        bgrid, (trace,) = run.traces(op["trace"], domain, 1)
        if name == "P":
            res = kerzman_stein_P(trace, bgrid)
            out.parent.mkdir(parents=True, exist_ok=True)
            write_cbnd(out, res)
            vals = res.values[0]
            report.update(outputs=[str(out)], result={"linf": float(np.abs(vals).max()), "mean": complex(vals.mean())})
            _write_report(_report_path(out), report)
            _summary({"operation": name, "output": out, "linf": report["result"]["linf"]})
            return EXIT["ok"]
        result = cauchy_extension(trace, bgrid, run.spec)
    else:
        if "input" not in op:
            raise ConfigError(f"operator {name} needs an 'input' field")
        u = run.field(op["input"])
        report["input"] = _field_norms(u, run)
        degree = op.get("degree", 32)
        if name == "S":
            result = beurling(u, run.backend_or("multiplier"))
        elif name == "T":
            result = cauchy_green(u, run.backend_or("convolution"))
        elif name in ("Sbar", "Tbar"):
            default = "multiplier" if name == "Sbar" else "convolution"
            result = conj_op(u, name[0], run.backend_or(default))
        elif name == "commS":
            if "a" not in op:
                raise ConfigError("commS needs a coefficient 'a'")
            result = commutator_S(run.field(op["a"]), u, run.backend_or("multiplier"))
        elif name == "S_omega":
            result = s_omega(u, run.need_domain(), run.backend_or("convolution"))
        elif name == "T_omega":
            result = t_omega(u, run.need_domain(), run.backend_or("convolution"))
        elif name == "B_disc":
            result = bergman_disc(u, degree)
        elif name == "S1":
            result = s1(u, run.backend_or("convolution"), degree)
        elif name == "T1":
            result = t1(u, degree)
        elif name == "B_omega":
            result = b_omega(u, run.need_domain(), run.backend_or("convolution"))
        elif name == "B_n":
            result = b_n(u, run.need_domain(), op.get("n", 1), run.backend_or("convolution"))
        else:  # pragma: no cover - schema restricts the names
            raise ConfigError(f"unknown operator {name}")
    report["outputs"] = _write_fields(out, result, heatmap)
    report["result"] = _field_norms(result, run)
    _write_report(_report_path(out), report)
    _summary({"operation": name, "output": out, "l2": report["result"]["l2"], "linf": report["result"]["linf"]})
    return EXIT["ok"]


def _solve_report(run: Run, rep: SolveReport, problem: dict) -> dict:
    report = _base_report(run, "solve")
    report["problem"] = problem["kind"]
    report["solve"] = rep.to_dict()
    return report


def cmd_solve(run: Run, out: Path, heatmap: bool) -> int:
    """Run one of the solvers on a configured problem."""
    prob = run.need("problem")
    solver = run.cfg.get("solver", {})
    tol, maxiter = solver.get("tol", 1e-10), solver.get("maxiter", 500)
    kind, m = prob["kind"], prob.get("m", 1)
    backend = run.backend_or("convolution")
    try:
        if kind in ("inteq_S", "inteq_S1"):
            if "A" not in prob or "rhs" not in prob:
                raise ConfigError("integral equations need 'A' and 'rhs'")
            A, b = run.matrix(prob["A"], m), run.vector(prob["rhs"], m)
            if kind == "inteq_S":
                sol, rep = solve_inteq_S(A, b, run.need_domain(), tol, maxiter, backend)
            else:
                sol, rep = solve_inteq_S1(A, b, tol, maxiter, backend)
        else:
            domain = UNIT_DISC if kind == "dirichlet" and run.domain is None else run.need_domain()
            a = run.matrix(prob.get("a", 0), m)
            b = run.matrix(prob.get("b", 0), m)
            c = run.vector(prob.get("c", 0), m)
            if kind == "dirichlet":
                if "f0" not in prob:
                    raise ConfigError("Dirichlet problems need boundary data 'f0'")
                bgrid, trs = run.traces(prob["f0"], domain, m)
                bc = DirichletRe(bgrid, tuple(BoundaryTrace((np.real(t.values[0]),)) for t in trs))
            else:
                if "f0" in prob:
                    bgrid, trs = run.traces(prob["f0"], domain, m)
                    bc = CauchyK(bgrid, tuple(trs))
                else:
                    bc = CauchyK()
            problem = EllipticProblem.build(domain, a, b, c, bc=bc, spec=run.spec, m=m)
            if kind == "dirichlet":
                sol, rep = solve_dirichlet_disc(problem, tol, maxiter, backend)
            else:
                sol, rep = solve_cauchy_bvp(problem, tol, maxiter, backend)
    except NoConvergence as exc:
        rep = exc.report if isinstance(exc.report, SolveReport) else SolveReport(iterations=len(exc.history), residual_history=exc.history)
        report = _solve_report(run, rep, prob)
        report["error"] = {"type": "NoConvergence", "message": str(exc)}
        _write_report(_report_path(out), report)
        _summary({"problem": kind, "converged": False, "iterations": rep.iterations, "report": _report_path(out)})
        return EXIT["noconv"]
    report = _solve_report(run, rep, prob)
    report["outputs"] = _write_fields(out, sol, heatmap)
    _write_report(_report_path(out), report)
    _summary(
        {
            "problem": kind,
            "converged": rep.converged,
            "iterations": rep.iterations,
            "equation_residual": rep.final_equation_residual,
            "bc_residual": rep.bc_residual,
            "output": out,
        }
    )
    return EXIT["ok"]


def cmd_bergman_compare(run: Run, out: Path | None, heatmap: bool) -> int:
    """Distances of B_n v to the reference Bergman projection."""
    blk = run.cfg.get("bergman", {})
    v = run.field(blk.get("input", "zbar"))
    rep = compare(v, run.need_domain(), tuple(blk.get("n_list", (1, 2, 4, 8))), run.backend_or("convolution"), blk.get("basis_degree", 24))
    report = _base_report(run, "bergman compare")
    report.update(n_list=rep.n_list, errors=rep.errors, final_error=rep.final_error, basis_degree=rep.basis_degree)
    if out is not None:
        _write_report(_report_path(out) if out.suffix != ".json" else out, report)
    for n, e in zip(rep.n_list, rep.errors):
        print(f"B_{n}\t{e:.6e}")
    print(f"basis_degree\t{rep.basis_degree}")
    return EXIT["ok"]


def cmd_beltrami(run: Run, out: Path, heatmap: bool) -> int:
    """Normal solution of the Beltrami equation for a given (or derived) mu."""
    blk = run.need("beltrami")
    if "mu" in blk:
        mu = run.field(blk["mu"])
    elif "a" in blk:
        mu = select_mu(run.field(blk["a"]), run.field(blk.get("b", 0)))
    else:
        raise ConfigError("beltrami block needs 'mu' or coefficients 'a', 'b'")
    report = _base_report(run, "beltrami")
    try:
        res = normal_solution(mu, run.backend_or("multiplier"), blk.get("tol", 1e-10), blk.get("maxiter", 200))
    except NoConvergence as exc:
        report.update(error={"type": "NoConvergence", "message": str(exc)}, history=exc.history)
        _write_report(_report_path(out), report)
        _summary({"converged": False, "iterations": len(exc.history)})
        return EXIT["noconv"]
    report.update(
        iterations=res.iterations,
        history=list(res.history),
        residual=res.residual,
        psi_z_norm=res.psi_z_norm,
        relative_residual=res.residual / res.psi_z_norm,
    )
    report["outputs"] = _write_fields(out, res.psi, heatmap)
    _write_report(_report_path(out), report)
    _summary({"iterations": res.iterations, "relative_residual": report["relative_residual"], "output": out})
    return EXIT["ok"]


def cmd_verify(suite: str, seed: int, out: Path | None, corrupt: bool) -> int:
    """Run a verification suite and print one line per check."""
    rep = run_suite(suite, seed=seed, corrupt_kernel_sign=corrupt, progress=lambda c: print(c.line(), flush=True))
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(rep.to_json() + "\n")
    print(f"suite\t{suite}\tpassed\t{rep.passed}\tseconds\t{rep.seconds:.1f}")
    return EXIT["ok"] if rep.passed else EXIT["verify"]


# -- entry point --------------------------------------------------------------------


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration (JSON)")
    common.add_argument("--out", type=Path, help="output file (.cfld/.cbnd); the report goes next to it")
    common.add_argument("--backend", choices=["multiplier", "convolution"], help="transform backend override")
    common.add_argument("--heatmap", action="store_true", help="also write PGM heatmaps of |field|")
    common.add_argument("--seed", type=_seed, default=None, help="seed for randomized fields (default 42)")

    parser = argparse.ArgumentParser(prog="planarsio", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("apply", parents=[common], help="apply an operator to a field")
    sub.add_parser("solve", parents=[common], help="solve an elliptic problem")
    berg = sub.add_parser("bergman", help="Bergman projection tools")
    bsub = berg.add_subparsers(dest="action", required=True)
    bsub.add_parser("compare", parents=[common], help="compare B_n with the reference projection")
    sub.add_parser("beltrami", parents=[common], help="normal solution of the Beltrami equation")
    ver = sub.add_parser("verify", parents=[common], help="run verification suites")
    ver.add_argument("suite", nargs="?", default="all", choices=SUITES)
    ver.add_argument("--corrupt-kernel-sign", action="store_true", help="sensitivity control: flip the transform sign in the closed-form check")
    return parser


def _fail(code: int, kind: str, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, 42 if args.seed is None else args.seed, args.out, args.corrupt_kernel_sign)
        if args.config is None:
            raise ConfigError("--config is required")
        cfg, base = load_config(args.config)
        run = Run(cfg, base, args)
        if args.command == "bergman":
            return cmd_bergman_compare(run, args.out, args.heatmap)
        if args.out is None:
            raise ConfigError("--out is required")
        handler = {"apply": cmd_apply, "solve": cmd_solve, "beltrami": cmd_beltrami}[args.command]
        return handler(run, args.out, args.heatmap)
    except (ConfigError, TagError, Unsupported, EllipticityError, FileNotFoundError) as exc:
        return _fail(EXIT["config"], type(exc).__name__, exc)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT["numerical"], type(exc).__name__, exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
