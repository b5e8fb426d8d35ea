"""Command-line entry point.

Exit codes: 0 success, 1 solver non-convergence, 2 input error,
3 rigidity disagreement (or a failed form check).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import curvature, diagnostics, packing, rigidity, schlaefli
from .errors import MeshError, NoSolutionPossible, PolyRigidError, SolverError, TargetUnattainable
from .geom import Geometry
from .mesh import Field, Support, fmt, format_field, load_field, load_mesh
from .solver import SolverConfig

EXIT_OK, EXIT_SOLVER, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3

CLOSEDNESS_LIMIT = 1e-4
MONOTONE_LIMIT = -1e-8


class InputError(Exception):
    """Bad flag combination, detected before any computation."""


def _add_functional(p, required=False):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--phi", type=float, metavar="H", help="phi_h curvature")
    g.add_argument("--psi", type=float, metavar="H", help="psi_h curvature (half-angle-excess sign)")
    g.add_argument("--laplacian", action="store_true", help="alias for --phi -2")


def _add_solver(p):
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)


def _functional(args):
    """``(which, h)`` or ``None`` when no functional flag is given."""
    if getattr(args, "laplacian", False):
        return "phi", -2.0
    if getattr(args, "phi", None) is not None:
        return "phi", args.phi
    if getattr(args, "psi", None) is not None:
        return "psi", args.psi
    return None


def _config(args) -> SolverConfig:
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    if args.max_iter < 0:
        raise InputError("--max-iter must be >= 0")
    return SolverConfig(tol=args.tol, max_iter=args.max_iter)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _print_lines(lines):
    for line in lines:
        print(line)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyrigid", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh-check", help="validate a closed triangulated surface")
    p.add_argument("mesh")

    p = sub.add_parser("curvature", help="vertex curvature, or phi/psi edge curvature, of a metric")
    p.add_argument("mesh")
    p.add_argument("--metric", required=True, help="edge field of lengths")
    p.add_argument("--geometry", required=True, choices=[g.value for g in Geometry])
    _add_functional(p)
    p.add_argument("--out", help="write the curvature field here instead of stdout")
    p.add_argument("--k-out", help="with a functional flag, also write vertex curvature here")

    p = sub.add_parser("pack-solve", help="radii of an inversive distance packing with given curvature")
    p.add_argument("mesh")
    p.add_argument("--geometry", required=True, choices=["e2", "h2"])
    p.add_argument("--inversive", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--init", help="vertex field of initial radii")
    _add_solver(p)
    p.add_argument("--out", help="write solution radii here instead of stdout")
    p.add_argument("--allow-negative-inversive", action="store_true")

    p = sub.add_parser("prescribe", help="edge lengths with prescribed phi_h or psi_h curvature")
    p.add_argument("mesh")
    p.add_argument("--geometry", required=True, choices=[g.value for g in Geometry])
    _add_functional(p, required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--init", help="edge field of initial lengths")
    _add_solver(p)
    p.add_argument("--out", help="write solution lengths here instead of stdout")

    p = sub.add_parser("rigidity-test", help="multi-start agreement of a prescribed-curvature solve")
    p.add_argument("mesh")
    p.add_argument("--geometry", required=True, choices=[g.value for g in Geometry])
    _add_functional(p)
    p.add_argument("--target", help="curvature target (edge field with a functional, else vertex field)")
    p.add_argument("--inversive", help="packing inversive distances")
    p.add_argument("--forward", type=int, metavar="SEED",
                   help="generate an attainable target from a seeded random packing/metric")
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_solver(p)
    p.add_argument("--allow-negative-inversive", action="store_true")

    p = sub.add_parser("form-check", help="closedness and monotone-gradient sampling")
    p.add_argument("--geometry", required=True, choices=[g.value for g in Geometry])
    _add_functional(p)
    p.add_argument("--packing", action="store_true", help="check the packing form instead")
    p.add_argument("--mesh", help="mesh for the monotone-gradient test (default tetrahedron)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strata", choices=["all", "interior", "degenerate"], default="all")
    return ap


# --------------------------------------------------------------------------
# commands

def cmd_mesh_check(args) -> int:
    m = load_mesh(args.mesh)
    print(f"V {m.n_vertices} E {m.n_edges} F {m.n_triangles} chi {m.euler_characteristic} "
          f"connected {'true' if m.connected else 'false'}")
    return EXIT_OK


def cmd_curvature(args) -> int:
    m = load_mesh(args.mesh)
    metric = curvature.PolyhedralMetric.from_field(args.geometry, load_field(args.metric, m, Support.EDGES))
    fn = _functional(args)
    if fn is None and args.k_out:
        raise InputError("--k-out needs --phi, --psi or --laplacian")
    which, h = fn if fn else (None, None)
    rep = curvature.curvature_report(m, metric, which, h)
    k_field = Field(Support.VERTICES, rep.k)
    if fn is None:
        _emit(format_field(k_field, m), args.out)
    else:
        _emit(format_field(Field(Support.EDGES, rep.edge), m), args.out)
        if args.k_out:
            Path(args.k_out).write_text(format_field(k_field, m), encoding="utf-8")
    print(f"gauss-bonnet {fmt(rep.total_k)} {fmt(rep.area)} {fmt(rep.residual)}")
    return EXIT_OK


def _solver_failure(exc: SolverError) -> int:
    if exc.report is not None:
        _print_lines(exc.report.lines())
    if isinstance(exc, TargetUnattainable) and exc.direction is not None:
        print("direction " + " ".join(fmt(x) for x in exc.direction))
    print(f"error {exc}", file=sys.stderr)
    return EXIT_SOLVER


def cmd_pack_solve(args) -> int:
    cfg = _config(args)
    m = load_mesh(args.mesh)
    inv = load_field(args.inversive, m, Support.EDGES).values
    target = load_field(args.target, m, Support.VERTICES).values
    init = load_field(args.init, m, Support.VERTICES).values if args.init else None
    try:
        data, rep = packing.solve_packing(m, args.geometry, inv, target, init, cfg,
                                          allow_negative_inversive=args.allow_negative_inversive)
    except NoSolutionPossible:
        raise
    except SolverError as exc:
        return _solver_failure(exc)
    _emit(format_field(Field(Support.VERTICES, data.radii), m), args.out)
    _print_lines(rep.lines())
    return EXIT_OK


def _spec_from_args(args) -> schlaefli.FunctionalSpec:
    which, h = _functional(args)
    return schlaefli.parse_spec(which, args.geometry, h)


def _coefficient_target(args, values):
    # psi targets are read in the half-angle-excess convention; the solver works with coefficient sums
    return -values if _functional(args)[0] == "psi" else values


def cmd_prescribe(args) -> int:
    cfg = _config(args)
    m = load_mesh(args.mesh)
    spec = _spec_from_args(args)
    target = _coefficient_target(args, load_field(args.target, m, Support.EDGES).values)
    init = load_field(args.init, m, Support.EDGES).values if args.init else None
    try:
        metric, rep = schlaefli.solve_prescribed(m, spec, target, init, cfg)
    except NoSolutionPossible:
        raise
    except SolverError as exc:
        return _solver_failure(exc)
    _emit(format_field(Field(Support.EDGES, metric.lengths), m), args.out)
    _print_lines(rep.lines())
    return EXIT_OK


def _rigidity_problem(args, m) -> rigidity.RigidityProblem:
    fn = _functional(args)
    if args.forward is not None and (args.target or args.inversive):
        raise InputError("--forward replaces --target/--inversive")
    if fn is None:
        if args.geometry == "s2":
            raise InputError("no spherical packing solver")
        if args.forward is not None:
            problem, _ = rigidity.packing_problem_from_seed(m, args.geometry, args.forward)
            return problem
        if not (args.target and args.inversive):
            raise InputError("packing rigidity needs --target and --inversive (or --forward)")
        inv = load_field(args.inversive, m, Support.EDGES).values
        packing.check_inversive(inv, args.allow_negative_inversive)
        target = load_field(args.target, m, Support.VERTICES).values
        return rigidity.RigidityProblem(m, args.geometry, target, inversive=inv)
    if args.inversive:
        raise InputError("--inversive applies to packings only")
    spec = _spec_from_args(args)
    if not spec.solver_allowed:
        raise InputError(f"{spec} has no convex energy; use form-check")
    if args.forward is not None:
        problem, _ = rigidity.metric_problem_from_seed(m, spec, args.forward)
        return problem
    if not args.target:
        raise InputError("--target or --forward is required")
    target = _coefficient_target(args, load_field(args.target, m, Support.EDGES).values)
    return rigidity.RigidityProblem(m, args.geometry, target, spec=spec)


def cmd_rigidity_test(args) -> int:
    cfg = _config(args)
    if args.starts < 1:
        raise InputError("--starts must be >= 1")
    m = load_mesh(args.mesh)
    if not m.connected:
        raise InputError("solvers require a connected surface")
    problem = _rigidity_problem(args, m)
    report = rigidity.multi_start(problem, args.starts, args.seed, cfg, workers=args.workers)
    _print_lines(report.lines())
    if not report.converged:
        return EXIT_SOLVER
    return EXIT_OK if report.agree else EXIT_DISAGREE


def cmd_form_check(args) -> int:
    fn = _functional(args)
    if args.packing == (fn is not None):
        raise InputError("give exactly one of --packing, --phi, --psi, --laplacian")
    if args.samples < 1 or args.pairs < 0:
        raise InputError("--samples must be >= 1 and --pairs >= 0")
    m = load_mesh(args.mesh) if args.mesh else None
    if m is None:
        from .mesh import tetrahedron
        m = tetrahedron()
    if args.packing:
        if args.geometry == "s2":
            raise InputError("no spherical packing energy")
        closed = diagnostics.packing_closedness(args.geometry, args.samples, args.seed, args.strata)
        mono = diagnostics.packing_monotone(m, args.geometry, args.pairs, args.seed) if args.pairs else None
    else:
        spec = _spec_from_args(args)
        closed = schlaefli.closedness_diagnostic(spec, args.samples, args.seed, args.strata)
        mono = None
        if spec.solver_allowed and args.pairs:
            mono = diagnostics.schlaefli_monotone(m, spec, args.pairs, args.seed)

    if args.strata == "degenerate":
        cmax = closed.degenerate_max if closed.degenerate_max is not None else 0.0
    else:
        cmax = closed.max
    print(f"closedness-max {fmt(cmax)}")
    deg = "none" if closed.degenerate_max is None else fmt(closed.degenerate_max)
    print(f"closedness-degenerate-max {deg}")
    print(f"samples interior {closed.n_interior} degenerate {closed.n_degenerate}")
    print(f"monotone-min {'n/a' if mono is None else fmt(mono.min_inner)}")
    ok = cmax <= CLOSEDNESS_LIMIT and (mono is None or mono.min_inner >= MONOTONE_LIMIT)
    if closed.degenerate_max is not None and closed.degenerate_max != 0.0:
        ok = ok and closed.degenerate_max <= CLOSEDNESS_LIMIT
    return EXIT_OK if ok else EXIT_DISAGREE


COMMANDS = {
    "mesh-check": cmd_mesh_check,
    "curvature": cmd_curvature,
    "pack-solve": cmd_pack_solve,
    "prescribe": cmd_prescribe,
    "rigidity-test": cmd_rigidity_test,
    "form-check": cmd_form_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SolverError as exc:
        if isinstance(exc, NoSolutionPossible):
            print(f"error {exc}", file=sys.stderr)
            return EXIT_INPUT
        return _solver_failure(exc)
    except (InputError, PolyRigidError, MeshError, ValueError, OSError) as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
