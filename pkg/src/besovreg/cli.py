"""Command-line interface.

Exit codes: 0 success, 1 validation error (bad input, infeasible plan),
2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .config import ConfigError, ExperimentConfig, parse_number, signature_from_dict
from .lab import DiagonalScaleOperator, MatrixOperator
from .planner import (
    PlanError,
    feasible_weakened_sources,
    plan_direct,
    plan_optimal,
    plan_weakened,
)
from .rates import run_rate_experiment
from .solver import ConvergenceError, PenaltySpec, solve_diagonal, solve_general
from .spaces import BesovSpace, CoefField, devore_csv, devore_diagram_data, differential_dimension

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fmt(x) -> str:
    return f"{float(x): .6f}"


def _plan_table(plans) -> str:
    head = f"{'plan':<10} {'p':>10} {'p_R':>10} {'s_R':>10} {'sigma':>10} {'eps~':>10}"
    lines = [head, "-" * len(head)]
    for pl in plans:
        lines.append(
            f"{pl.provenance:<10} {_fmt(pl.p):>10} {_fmt(pl.p_R):>10} {_fmt(pl.s_R):>10}"
            f" {_fmt(pl.sigma):>10} {_fmt(pl.epsilon_tilde):>10}"
        )
    return "\n".join(lines) + "\n"


def cmd_plan(args) -> int:
    sig = signature_from_dict(_read_json(args.signature))
    if args.direct:
        plans = [plan_direct(sig)]
    elif args.weakened is not None:
        plans = [plan_weakened(sig, parse_number(args.weakened, "--weakened"))]
    elif args.optimal:
        plans = [plan_optimal(sig)]
    else:
        plans = [plan_direct(sig), plan_optimal(sig)]
    doc = {"plans": [pl.to_dict() for pl in plans]}
    if args.json == "-":
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    if args.json:
        Path(args.json).write_text(json.dumps(doc, indent=2) + "\n")
    sys.stdout.write(_plan_table(plans))
    return EXIT_OK


def cmd_feasible(args) -> int:
    sig = signature_from_dict(_read_json(args.signature))
    S, D, G, d = sig.source, sig.domain, sig.adjoint_range, sig.d
    lo = max(1 / float(D.p), 1 / float(G.p)) if args.inv_p_min is None else args.inv_p_min
    hi = 1 / float(S.p) if args.inv_p_max is None else args.inv_p_max
    s_lo = (
        float(differential_dimension(D)) + d * lo if args.s_min is None else args.s_min
    )
    s_hi = float(differential_dimension(S)) + d * hi if args.s_max is None else args.s_max
    inv_p = np.linspace(lo, hi, args.n)
    s_vals = np.linspace(s_lo, s_hi, args.n)
    pts = feasible_weakened_sources(sig, s_vals.tolist(), (1 / inv_p).tolist())
    rows = ["s,p,inv_p,ddim"]
    for b in pts:
        rows.append(f"{float(b.s)!r},{float(b.p)!r},{float(b.inv_p)!r},{float(b.ddim)!r}")
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def _parse_point(text: str, d: int):
    try:
        label, s, p = text.split(":")
        return label, BesovSpace(parse_number(s, "--point s"), parse_number(p, "--point p"), d)
    except ValueError as exc:
        raise ConfigError(f"--point {text!r}: expected LABEL:S:P ({exc})") from None


def cmd_devore(args) -> int:
    points, lines = [], list(args.line)
    d = args.d
    if args.signature:
        sig = signature_from_dict(_read_json(args.signature))
        d = sig.d
        points += [("B_D", sig.domain), ("B_G", sig.adjoint_range), ("B_S", sig.source)]
        for pl in (plan_direct(sig), plan_optimal(sig)):
            points.append((f"B_R:{pl.provenance}", pl.penalty_space))
        lines += [float(differential_dimension(sig.domain)), float(differential_dimension(sig.source))]
    points += [_parse_point(t, d) for t in args.point]
    samples = [float(x) for x in args.inv_p_samples.split(",")] if args.inv_p_samples else (0.0, 1.0, 2.0)
    rows = devore_diagram_data(points, lines, samples, d=d)
    _emit(devore_csv(rows), args.out)
    return EXIT_OK


def _operator(spec: dict):
    kind = spec.get("type", "diagonal")
    if "max_level" not in spec:
        raise ConfigError("operator: missing field 'max_level'")
    J = spec["max_level"]
    if kind == "diagonal":
        return DiagonalScaleOperator(float(parse_number(spec.get("eta", 1), "operator.eta")), J)
    if kind == "matrix":
        if "matrix" not in spec:
            raise ConfigError("operator: missing field 'matrix'")
        return MatrixOperator(spec["matrix"], J)
    raise ConfigError(f"operator.type: unknown operator {kind!r}")


def cmd_solve(args) -> int:
    op = _operator(_read_json(args.operator))
    data = CoefField.from_csv(Path(args.data).read_text())
    space = BesovSpace(parse_number(args.s, "--s"), parse_number(args.p, "--p"), 1)
    pen = PenaltySpec(space, args.alpha, None if args.power is None else args.power)
    if isinstance(op, DiagonalScaleOperator) and not args.general:
        rep = solve_diagonal(op, data, pen)
    else:
        rep = solve_general(op, data, pen, max_iter=args.max_iter, tol=args.tol)
    _emit(rep.minimizer.to_csv(), args.out)
    if args.report:
        Path(args.report).write_text(rep.to_json() + "\n")
    else:
        sys.stderr.write(rep.to_json() + "\n")
    return EXIT_OK


def cmd_rate(args) -> int:
    cfg = ExperimentConfig.from_dict(_read_json(args.config))
    rep = run_rate_experiment(cfg)
    Path(args.out_json).write_text(rep.to_json() + "\n")
    Path(args.out_csv).write_text(rep.to_csv())
    sys.stdout.write(
        f"sigma = {rep.sigma:.6f}  slope = {rep.slope:.4f}  R^2 = {rep.r_squared:.5f}\n"
    )
    return EXIT_OK


def cmd_examples(args) -> int:
    results = fixtures.run_all()
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}\n")
    failed = sum(1 for _, ok, _ in results if not ok)
    sys.stdout.write(f"{len(results) - failed}/{len(results)} passed\n")
    return EXIT_OK if failed == 0 else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="besovreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="penalty space and rate index for a signature")
    p.add_argument("signature", help="ProblemSignature JSON file ('-' for stdin)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--direct", action="store_true")
    g.add_argument("--weakened", metavar="P")
    g.add_argument("--optimal", action="store_true")
    p.add_argument("--json", metavar="PATH", help="write plan JSON here ('-' for stdout only)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("feasible", help="CSV of admissible weakened source spaces")
    p.add_argument("signature")
    p.add_argument("-n", type=int, default=21, help="grid points per axis")
    p.add_argument("--inv-p-min", type=float)
    p.add_argument("--inv-p-max", type=float)
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("devore", help="CSV of DeVore diagram points and lines")
    p.add_argument("--signature")
    p.add_argument("--point", action="append", default=[], metavar="LABEL:S:P")
    p.add_argument("--line", action="append", default=[], type=float, metavar="C")
    p.add_argument("--inv-p-samples", metavar="X,Y,...")
    p.add_argument("-d", type=int, default=1)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_devore)

    p = sub.add_parser("solve", help="minimise the Tikhonov functional")
    p.add_argument("--operator", required=True, help="operator JSON")
    p.add_argument("--data", required=True, help="data CSV (level,position,value)")
    p.add_argument("--s", required=True, help="penalty smoothness s_R")
    p.add_argument("--p", required=True, help="penalty integrability p_R")
    p.add_argument("--power", type=float, help="penalty power q (default p_R)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--general", action="store_true", help="force proximal gradient")
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("-o", "--out", help="minimiser CSV")
    p.add_argument("--report", help="SolveReport JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("rate", help="run a delta-grid rate experiment")
    p.add_argument("config", help="ExperimentConfig JSON")
    p.add_argument("--out-json", default="rate_report.json")
    p.add_argument("--out-csv", default="rate_report.csv")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("examples", help="run the pinned reference problems")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PlanError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (ConvergenceError, OverflowError, FloatingPointError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
