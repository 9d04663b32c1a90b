"""Command-line interface.

Exit codes: 0 success, 2 no solution (hyperbolic at the axis), 3 parabolic
degeneration or negative radicand, 4 non-convergence (also vertical
profiles), 5 bad input, 1 anything unexpected.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from ._validation import check_params
from .core import Branch, Phi, classify_at, classify_global
from .dirichlet import functional_residual_2d, sign_report, solve_dirichlet_disk
from .errors import BadInput, WeingartenError
from .geometry import revolve_to_mesh, weingarten_residual
from .io import (
    atomic_write,
    dumps,
    read_config,
    read_profile_csv,
    solve_report,
    write_obj,
    write_profile_csv,
    write_report,
)
from .parabolic import (
    ArcClass,
    CircleSolution,
    circle_profile,
    classify_arc,
    cylinder_profile,
    normalize_parabolic,
    stitch_circle,
)
from .radial import (
    SolverConfig,
    continue_ode,
    fixed_point_solve,
    initial_curvature,
    ode_residual,
    solve_shrinking,
)

BOOLEAN_FLAGS = {"auto-shrink", "check-2d", "cylinder"}


def _phi_arg(text):
    try:
        return Phi.parse(text)
    except BadInput as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _branch_arg(text):
    try:
        return Branch.coerce(text)
    except (BadInput, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BadInput.exit_code, f"{self.prog}: error: {message}\n")


def _add_equation(p, phi_required=True):
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--phi", type=_phi_arg, required=phi_required,
                   help="const:<c> | identity | poly:<c0>,<c1>,...")


def _add_solver(p):
    p.add_argument("--R", type=float, default=0.5)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--slope-cap", type=float, default=1e3)
    p.add_argument("--branch", type=_branch_arg, default=Branch.PLUS)
    p.add_argument("--auto-shrink", action="store_true",
                   help="halve R up to 8 times when the iteration fails")


def _add_outputs(p, csv_out=True):
    if csv_out:
        p.add_argument("--out", help="profile CSV (r,u,du)")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--obj", help="OBJ mesh of the surface of revolution")
    p.add_argument("--ntheta", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weingarten", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key=value file supplying option defaults")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="type of the equation (elliptic/parabolic/hyperbolic)")
    _add_equation(p)
    p.add_argument("--nu", type=float, default=1.0, help="point for the local type")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--report")

    p = sub.add_parser("solve", help="axis problem by fixed-point iteration")
    _add_equation(p)
    _add_solver(p)
    p.add_argument("--continue-to", type=float, help="extend the profile to this radius")
    p.add_argument("--step", type=float, help="continuation step (default R/n)")
    _add_outputs(p)

    p = sub.add_parser("dirichlet", help="zero boundary values on the disk of radius R")
    _add_equation(p)
    _add_solver(p)
    p.add_argument("--fp-radius", type=float, help="fixed-point interval (default R)")
    _add_outputs(p)

    p = sub.add_parser("parabolic", help="closed-form circle solutions of 2aH - K = a^2")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, help="with --phi, normalise a parabolic relation first")
    p.add_argument("--phi", type=_phi_arg)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--sign", type=_branch_arg, default=Branch.MINUS)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--cylinder", action="store_true", help="the vertical line r = 1/a")
    p.add_argument("--height", type=float, default=1.0)
    _add_outputs(p)

    p = sub.add_parser("verify", help="residuals of a profile CSV")
    _add_equation(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--branch", type=_branch_arg, default=Branch.PLUS)
    p.add_argument("--check-2d", action="store_true")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--report")

    p = sub.add_parser("mesh", help="revolve a profile CSV into an OBJ mesh")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--obj", required=True)
    p.add_argument("--ntheta", type=int, default=64)

    p = sub.add_parser("sweep", help="solve over a grid of (a, b, phi)")
    p.add_argument("--a-values", required=True, help="comma separated")
    p.add_argument("--b-values", required=True, help="comma separated")
    p.add_argument("--phi-values", required=True, help="semicolon separated phi specs")
    _add_solver(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="summary CSV")
    return parser


def _expand_config(argv):
    """Splice ``--config`` entries in right after the subcommand.

    Later flags win in argparse, so explicit command-line options override
    the file.
    """
    argv = list(argv)
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise BadInput("--config needs a path")
    path = argv[i + 1]
    del argv[i:i + 2]
    extra = []
    for key, value in read_config(path).items():
        if key in BOOLEAN_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                extra.append(f"--{key}")
        else:
            extra += [f"--{key}", value]
    commands = {"classify", "solve", "dirichlet", "parabolic", "verify", "mesh", "sweep"}
    pos = next((j for j, tok in enumerate(argv) if tok in commands), None)
    if pos is None:
        raise BadInput("no subcommand given")
    return argv[:pos + 1] + extra + argv[pos + 1:]


def _emit(report, path=None):
    if path:
        write_report(path, report)
    sys.stdout.write(dumps(report))


def _config(args, R=None):
    return SolverConfig(R=args.R if R is None else R, n=args.n, tol=args.tol,
                        max_iter=args.max_iter, slope_cap=args.slope_cap)


def _params(args):
    return check_params(args.a, args.b)


def cmd_classify(args):
    params = _params(args)
    local = classify_at(params, args.phi, args.nu)
    glob = classify_global(params, args.phi, args.samples)
    report = {
        "params": {"a": params.a, "b": params.b},
        "phi": str(args.phi),
        "kind": glob.kind.value,
        "discriminant_min": glob.d_min,
        "discriminant_max": glob.d_max,
        "n_samples": glob.n_samples,
        "local": {"nu": args.nu, "kind": local.kind.value, "discriminant": local.discriminant},
        "status": "ok",
    }
    _emit(report, args.report)
    return 0


def _solve(args, params):
    if args.auto_shrink:
        return solve_shrinking(params, args.phi, args.branch, _config(args))
    return fixed_point_solve(params, args.phi, args.branch, _config(args))


def _write_outputs(args, sol):
    if getattr(args, "out", None):
        write_profile_csv(args.out, sol)
    if getattr(args, "obj", None):
        write_obj(args.obj, revolve_to_mesh(sol, args.ntheta))


def _solution_report(args, params, sol, status="ok", **extra):
    residual = ode_residual(params, args.phi, sol)
    return solve_report(
        params=params, phi=args.phi, branch=args.branch,
        classification=classify_at(params, args.phi, 1.0).kind.value,
        grid={"R": sol.R, "n": len(sol) - 1},
        iterations=sol.iterations,
        residual=residual.as_dict(),
        initial_curvature=initial_curvature(params, args.phi, args.branch),
        status=status, **extra)


def cmd_solve(args):
    params = _params(args)
    sol = _solve(args, params)
    extra = {}
    if args.continue_to is not None:
        step = args.step or sol.R / (len(sol) - 1)
        sol = continue_ode(sol, args.continue_to, step, args.slope_cap)
        extra["stop_reason"] = sol.stop_reason
    _write_outputs(args, sol)
    _emit(_solution_report(args, params, sol, **extra), args.report)
    return 0


def cmd_dirichlet(args):
    params = _params(args)
    fp = args.fp_radius if args.fp_radius is not None else args.R
    sol = solve_dirichlet_disk(params, args.phi, args.branch, args.R, _config(args, R=fp))
    sign = sign_report(sol)
    _write_outputs(args, sol)
    _emit(_solution_report(args, params, sol, sign={
        "verdict": sign.verdict.value, "min": sign.extremes[0], "max": sign.extremes[1]},
        boundary_value=float(sol.u[-1])), args.report)
    return 0


def cmd_parabolic(args):
    a = args.a
    if args.b is not None or args.phi is not None:
        if args.b is None or args.phi is None or not args.phi.is_constant:
            raise BadInput("normalising needs --b and a constant --phi")
        a, _, _ = normalize_parabolic(args.a, args.b, args.phi.coeffs[0])
    if args.cylinder:
        cyl = cylinder_profile(a, args.height)
        report = {"a": a, "b": -1.0, "c": a * a, "arc_class": ArcClass.CYLINDER_LINE.value,
                  "r0": cyl.r0, "H": cyl.H, "K": cyl.K, "relation_lhs": cyl.relation_lhs(),
                  "status": "ok"}
        if args.obj:
            write_obj(args.obj, revolve_to_mesh(cyl, args.ntheta))
        _emit(report, args.report)
        return 0
    csol = CircleSolution(a, args.k, args.m, args.sign)
    sol = circle_profile(csol, args.n)
    res = ode_residual(sol.params, sol.phi, sol)
    report = {
        "a": a, "b": -1.0, "c": a * a, "k": args.k, "m": args.m, "sign": csol.sign.value,
        "arc_class": classify_arc(a, args.k).value,
        "radius": csol.radius, "center": list(csol.center),
        "domain": list(csol.domain()),
        "residual": res.as_dict(),
        "status": "ok",
    }
    if args.out:
        write_profile_csv(args.out, sol)
    if args.obj:
        write_obj(args.obj, revolve_to_mesh(stitch_circle(a, args.k, args.m, 2 * args.n),
                                            args.ntheta))
    _emit(report, args.report)
    return 0


def cmd_verify(args):
    params = _params(args)
    sol = read_profile_csv(args.infile, params, args.phi, args.branch)
    extra = {"weingarten_residual": weingarten_residual(params, args.phi, sol).as_dict()}
    if args.check_2d:
        extra["functional_residual_2d"] = functional_residual_2d(
            params, args.phi, sol, args.grid, args.h).as_dict()
    try:
        k0 = initial_curvature(params, args.phi, args.branch)
    except WeingartenError:
        k0 = None
    report = solve_report(
        params=params, phi=args.phi, branch=args.branch,
        classification=classify_at(params, args.phi, 1.0).kind.value,
        grid={"R": sol.R, "n": len(sol) - 1}, iterations=None,
        residual=ode_residual(params, args.phi, sol).as_dict(),
        initial_curvature=k0, status="ok", **extra)
    _emit(report, args.report)
    return 0


def cmd_mesh(args):
    with open(args.infile, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]][:2] != ["r", "u"]:
        raise BadInput(f"{args.infile}: expected header r,u,du")
    pts = np.array([[float(row[0]), float(row[1])] for row in rows[1:] if row])
    mesh = revolve_to_mesh(pts, args.ntheta)
    write_obj(args.obj, mesh)
    _emit({"vertices": len(mesh.vertices), "faces": len(mesh.faces),
           "euler_characteristic": mesh.euler_characteristic(), "status": "ok"})
    return 0


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise BadInput(f"cannot parse number list {text!r}") from None


def cmd_sweep(args):
    phis = [Phi.parse(s) for s in args.phi_values.split(";") if s.strip()]
    grid = list(itertools.product(_floats(args.a_values), _floats(args.b_values), phis))

    def run(item):
        a, b, phi = item
        row = {"a": a, "b": b, "phi": str(phi), "branch": args.branch.value}
        try:
            params = check_params(a, b)
            sub = replace_args(args, phi=phi)
            sol = _solve(sub, params)
            res = ode_residual(params, phi, sol)
            row.update(status="ok", exit_code=0, R=sol.R, iterations=sol.iterations,
                       max_abs=res.max_abs,
                       initial_curvature=initial_curvature(params, phi, args.branch))
        except WeingartenError as exc:
            row.update(status=type(exc).__name__, exit_code=exc.exit_code, R=None,
                       iterations=None, max_abs=None, initial_curvature=None)
        return row

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(run, grid))
    if args.out:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["a"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        atomic_write(args.out, buf.getvalue())
    counts = {}
    for row in rows:
        counts[row["status"]] = counts.get(row["status"], 0) + 1
    _emit({"cases": len(rows), "by_status": counts, "status": "ok"})
    return 0


def replace_args(args, **changes):
    ns = argparse.Namespace(**vars(args))
    for k, v in changes.items():
        setattr(ns, k, v)
    return ns


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "dirichlet": cmd_dirichlet,
    "parabolic": cmd_parabolic,
    "verify": cmd_verify,
    "mesh": cmd_mesh,
    "sweep": cmd_sweep,
}


def _error_report(exc, args):
    report = {"status": type(exc).__name__, "error": str(exc), "exit_code": exc.exit_code}
    for attr in ("r_star", "r_stop", "iterations"):
        value = getattr(exc, attr, None)
        if value is not None:
            report[attr] = value
    return report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        argv = _expand_config(argv)
    except (BadInput, OSError) as exc:
        sys.stderr.write(f"weingarten: {exc}\n")
        return BadInput.exit_code
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except WeingartenError as exc:
        report = _error_report(exc, args)
        path = getattr(args, "report", None)
        _emit(report, path)
        return exc.exit_code
    except OSError as exc:
        _emit({"status": "BadInput", "error": str(exc), "exit_code": BadInput.exit_code})
        return BadInput.exit_code


def cli_run(argv) -> int:
    """Run one command; returns the exit code instead of exiting."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
