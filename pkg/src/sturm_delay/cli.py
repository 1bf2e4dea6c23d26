"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 I/O or malformed JSON,
4 usage error, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .asymptotics import eigenfunction_first_order, eigenfunction_refined, mu_refined
from .characteristic import H_norm, bound_audit
from .integrator import IntegrationError, eval_solution, solve_w
from .problem import PI, ProblemError, ProblemSpec, load_spec, validate_problem
from .quadrature import QuadratureError
from .spectrum import NoRootInWindow, find_eigen_near
from .volterra import NonContractionError, PicardBudgetError, cross_validate_report

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3, 4, 5

EIG_COLUMNS = ["N", "mu_num", "eigenvalue", "mu_lead", "mu_asym", "err_lead", "err_asym",
               "N_err_lead", "N2_err_asym", "window_hits", "advisory"]
EFUN_COLUMNS = ["segment", "x", "w_num", "u_first", "u_refined", "abs_err_refined"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tool_version() -> str:
    try:
        return version("sturm-delay")
    except PackageNotFoundError:
        return "unknown"


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def _threads() -> int:
    try:
        n = int(os.environ.get("STURM_DELAY_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


class Run:
    """Collects outputs and writes the sidecar manifest next to each file."""

    def __init__(self, args, spec: ProblemSpec | None):
        self.args = args
        self.spec = spec
        self.t0 = time.perf_counter()
        self.outputs: list[str] = []
        self.notes: list[str] = []

    def emit(self, text: str, out: str | None) -> None:
        if out is None:
            sys.stdout.write(text)
            return
        path = Path(out)
        path.write_text(text, encoding="utf-8")
        self.outputs.append(str(path))

    def finish(self) -> None:
        for out in self.outputs:
            manifest = {
                "command": self.args.command,
                "spec": str(self.args.spec),
                "numerics": asdict(self.spec.numerics) if self.spec else None,
                "outputs": self.outputs,
                "argv": sys.argv[1:],
                "wall_clock_s": round(time.perf_counter() - self.t0, 3),
                "version": _tool_version(),
                "notes": self.notes,
            }
            Path(out + ".manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load(args, check: bool = True) -> ProblemSpec:
    spec = load_spec(args.spec)
    if check:
        report = validate_problem(spec)
        if not report.ok:
            failed = "; ".join(c.name for c in report.checks if not c.advisory and not c.passed)
            raise ProblemError(f"standing assumptions violated: {failed}")
    changes = {}
    if getattr(args, "steps_per_mu", None) is not None:
        changes["steps_per_unit_mu"] = args.steps_per_mu
    if getattr(args, "root_tol", None) is not None:
        changes["root_tol"] = args.root_tol
    return spec.with_numerics(**changes) if changes else spec


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    spec = _load(args, check=False)
    report = validate_problem(spec)
    print(report.format())
    if not report.ok:
        print("problem violates the standing assumptions", file=sys.stderr)
        return EXIT_INVALID
    if not report.conditions_ab:
        print("WARNING: conditions a)/b) not met; refined asymptotics are advisory only")
    return EXIT_OK


def cmd_eig(args) -> int:
    if args.nmin < 1 or args.nmax < args.nmin:
        raise UsageError(f"need 1 <= nmin <= nmax, got nmin={args.nmin}, nmax={args.nmax}")
    spec = _load(args)
    run = Run(args, spec)
    advisory = not validate_problem(spec).conditions_ab

    def one(N):
        try:
            return find_eigen_near(spec, N, advisory=advisory)
        except NoRootInWindow as exc:
            return exc

    Ns = list(range(args.nmin, args.nmax + 1))
    with ThreadPoolExecutor(max_workers=min(_threads(), len(Ns))) as pool:
        results = list(pool.map(one, Ns))

    rows = []
    failed = False
    for N, rec in zip(Ns, results):
        if isinstance(rec, NoRootInWindow):
            a = mu_refined(spec, N)
            rows.append([N, math.nan, math.nan, a.mu_lead, a.mu_asym, math.nan, math.nan,
                         math.nan, math.nan, 0, advisory])
            run.notes.append(str(rec))
            failed |= N >= args.n0
            continue
        if not rec.accepted:
            run.notes.append(f"N={N}: {rec.window_hits} roots in window {list(rec.candidates)}")
            failed |= N >= args.n0
        rows.append([N, rec.mu_num, rec.eigenvalue, rec.mu_lead, rec.mu_asym, rec.err_lead,
                     rec.err_asym, rec.scaled_lead, rec.scaled_asym, rec.window_hits, rec.advisory])
    run.emit(_csv_text(EIG_COLUMNS, rows), args.out)
    run.finish()
    for note in run.notes:
        print(note, file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def efun_rows(spec: ProblemSpec, N: int, grid: int):
    rec = find_eigen_near(spec, N)
    xs = np.linspace(0.0, PI, grid)
    sol = solve_w(spec, rec.mu_num)
    w, _ = eval_solution(sol, xs, side="right")
    u1 = eigenfunction_first_order(spec, rec.mu_num, xs, side="right")
    u2 = eigenfunction_refined(spec, N, xs, side="right")
    segs = np.where(xs < spec.h1, 1, np.where(xs < spec.h2, 2, 3))
    rows = [[f"S{s}", x, a, b, c, abs(c - a)] for s, x, a, b, c in zip(segs, xs, w, u1, u2)]
    return rec, rows


def cmd_efun(args) -> int:
    if args.N < 1:
        raise UsageError("N must be >= 1")
    if args.grid < 16:
        raise UsageError(f"grid must be >= 16, got {args.grid}")
    spec = _load(args)
    run = Run(args, spec)
    rec, rows = efun_rows(spec, args.N, args.grid)
    run.notes.append(f"mu_num={rec.mu_num:.12g}")
    run.emit(_csv_text(EFUN_COLUMNS, rows), args.out)
    run.finish()
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    spec = _load(args)
    if not args.mu > 0:
        raise UsageError("mu must be positive")
    report = cross_validate_report(spec, args.mu, force=args.force)
    if report.forced:
        print("ADVISORY: mu is below the contraction threshold; no accuracy claim is made")
    print(f"mu = {fmt(report.mu)}")
    print(f"discrepancy = {report.discrepancy:.6e}")
    for p, d in zip(report.picard, report.per_segment):
        trace = " ".join(f"{c:.3e}" for c in p.trace)
        print(f"{p.segment.name}: sup|picard - rk4| = {d:.6e}  iterations = {p.iterations}  "
              f"trace: {trace}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    if not args.mu:
        raise UsageError("give at least one --mu value")
    spec = _load(args)
    run = Run(args, spec)
    qa = spec.q_abs_integrals()
    rows = []
    bad = 0
    for mu in args.mu:
        if not mu > 0:
            raise UsageError("mu values must be positive")
        rep = bound_audit(spec, mu, q_abs=qa)
        bad += rep.violations
        for r in rep.rows:
            rows.append([mu, r.quantity, r.sampled_max, r.bound, r.threshold,
                         r.applicable, r.status])
    run.emit(_csv_text(["mu", "quantity", "sampled_max", "bound", "threshold",
                        "applicable", "status"], rows), args.out)
    run.finish()
    return EXIT_NUMERIC if bad else EXIT_OK


def cmd_charscan(args) -> int:
    if not (0 < args.mu_lo < args.mu_hi) or args.points < 2:
        raise UsageError("need 0 < mu_lo < mu_hi and points >= 2")
    spec = _load(args)
    run = Run(args, spec)
    mus = np.linspace(args.mu_lo, args.mu_hi, args.points)
    rows = [[m, H_norm(spec, float(m))] for m in mus]
    run.emit(_csv_text(["mu", "H_norm"], rows), args.out)
    run.finish()
    return EXIT_OK


def cmd_solve(args) -> int:
    if not args.mu > 0:
        raise UsageError("mu must be positive")
    spec = _load(args)
    run = Run(args, spec)
    sol = solve_w(spec, args.mu)
    rows = []
    for s in sol.segments:
        for x, w, d in zip(s.nodes, s.values, s.derivs):
            rows.append([s.segment.name, x, w, d])
    run.emit(_csv_text(["segment", "x", "w", "w_prime"], rows), args.out)
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sturm-delay", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, numerics=True):
        sp.add_argument("--spec", required=True, help="problem JSON file")
        if numerics:
            sp.add_argument("--steps-per-mu", type=int, dest="steps_per_mu",
                            help="override numerics.steps_per_unit_mu")
            sp.add_argument("--root-tol", type=float, dest="root_tol",
                            help="override numerics.root_tol")

    sp = sub.add_parser("validate", help="check the problem's assumptions")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("eig", help="eigenvalue table with asymptotic comparisons")
    common(sp)
    sp.add_argument("--nmin", type=int, default=1)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--n0", type=int, default=3,
                    help="window anomalies below this N are flagged but not fatal")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("efun", help="eigenfunction against its asymptotic forms")
    common(sp)
    sp.add_argument("--N", "--n", type=int, required=True, dest="N")
    sp.add_argument("--grid", type=int, default=256)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_efun)

    sp = sub.add_parser("crosscheck", help="Picard oracle versus RK4 shooting")
    common(sp)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--force", action="store_true",
                    help="iterate even below the contraction threshold")
    sp.set_defaults(func=cmd_crosscheck)

    sp = sub.add_parser("bounds", help="a-priori bound audit at several mu")
    common(sp)
    sp.add_argument("--mu", type=float, nargs="*", default=[])
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("charscan", help="tabulate the normalised characteristic function")
    common(sp)
    sp.add_argument("--mu-lo", type=float, required=True, dest="mu_lo")
    sp.add_argument("--mu-hi", type=float, required=True, dest="mu_hi")
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_charscan)

    sp = sub.add_parser("solve", help="dump the shooting solution at the grid nodes")
    common(sp)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sturm-delay {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonContractionError as exc:
        print(f"sturm-delay {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProblemError as exc:
        print(f"sturm-delay {args.command}: invalid problem: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"sturm-delay {args.command}: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO
    except (IntegrationError, PicardBudgetError, QuadratureError, NoRootInWindow) as exc:
        print(f"sturm-delay {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
