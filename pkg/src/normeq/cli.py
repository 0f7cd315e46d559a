"""Command line front end.

Subcommands::

    normeq solve    --a A --b B (--input FILE | --zero M N) [--norm N] [--format F]
    normeq classify --a A --b B (--y Y | --input FILE | --zero M N)
    normeq sample   (--radius R | --a A --b B) [--c C ...] [--shape M N]
    normeq simulate --dt DT --tau-p T --sigma-c S --driving FILE --output FILE

Matrices are read from CSV (comma separated rows, one per line) or JSON
(``{"rows": m, "cols": n, "data": [...]}`` row-major). A driving sequence is
a series of 3 x 3 CSV blocks separated by blank lines.

Exit status is 0 on success, 2 for bad arguments or input and 1 for solver
failures; errors go to stderr as a single line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .errors import ConvergenceError, NormEqError
from .matrix import (
    BUILTIN_NORMS,
    ZeroUnionSphere,
    as_matrix,
    norm,
    sample_degenerate,
    solve_equation,
)
from .scalar import SolverParams, classify, critical_points
from .stress import StressStepConfig, simulate, write_trajectory_csv

NORM_ALIASES = {"one": "one", "1": "one", "two": "two", "2": "two", "inf": "inf",
                "frobenius": "frobenius", "fro": "frobenius"}
SIGN_CHARS = {1: "+", -1: "-", 0: "0"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


# -- input -----------------------------------------------------------------

def parse_csv_matrix(text: str) -> np.ndarray:
    rows = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise UsageError(f"malformed matrix row {line!r}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise UsageError("matrix rows must be non-empty and of equal length")
    return as_matrix(rows)


def parse_json_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
        m, n, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        A = np.asarray(data, dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed JSON matrix: {exc}") from exc
    if A.size != m * n or m < 1 or n < 1:
        raise UsageError(f"JSON matrix has {A.size} entries, expected {m}x{n}")
    return as_matrix(A.reshape(m, n))


def read_matrix(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return parse_json_matrix(text)
    return parse_csv_matrix(text)


def read_driving(path: str) -> list[np.ndarray]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    blocks, current = [], []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    mats = [parse_csv_matrix("\n".join(b)) for b in blocks]
    if not mats:
        raise UsageError("driving file holds no matrices")
    for k, M in enumerate(mats):
        if M.shape != (3, 3):
            raise UsageError(f"driving block {k} is {M.shape[0]}x{M.shape[1]}, expected 3x3")
    return mats


def _matrix_arg(args) -> np.ndarray:
    if args.input is not None:
        return read_matrix(args.input)
    if args.zero is not None:
        m, n = args.zero
        if m < 1 or n < 1:
            raise UsageError("--zero needs positive dimensions")
        return np.zeros((m, n))
    raise UsageError("one of --input or --zero is required")


def _params(args) -> SolverParams:
    if args.b == 0.0:
        raise UsageError("--b must be nonzero")
    return SolverParams(args.a, args.b)


def _norm(name: str) -> str:
    try:
        return NORM_ALIASES[name.lower()]
    except KeyError:
        raise UsageError(f"unknown norm {name!r}; choose from {', '.join(BUILTIN_NORMS)}") from None


# -- reports ---------------------------------------------------------------

def _thresholds(params: SolverParams) -> dict:
    cp = critical_points(params)
    out = {}
    if cp.f_at_x0 is not None:
        out["t0"] = cp.f_at_x0
    if cp.f_at_x1 is not None:
        out["t1"] = cp.f_at_x1
    return out


def _degenerate_samples(sol: ZeroUnionSphere, count: int) -> list[np.ndarray]:
    m, n = sol.shape
    if m < 2 or n < 2:
        return sol.members()[1:] if (m, n) == (1, 1) else []
    cs = np.linspace(0.0, sol.radius, count) if count > 1 else [0.0]
    return [sample_degenerate(sol.kind, sol.radius, min(c, sol.radius), m, n) for c in cs]


def solve_report(params: SolverParams, Y: np.ndarray, kind: str, samples: int = 3,
                 method: str = "bracket") -> dict:
    t = time.perf_counter()
    y = norm(Y, kind)
    sol = solve_equation(params, Y, kind, method=method)
    roots = sol.roots
    report = {
        "case": sol.case.letter,
        "expected_count": sol.case.expected_solution_count,
        "norm": kind,
        "y": y,
        "roots": [{"x": r.x, "sign": SIGN_CHARS[r.sign], "tangent": r.tangent} for r in roots],
        "thresholds": _thresholds(params),
    }
    if isinstance(sol, ZeroUnionSphere):
        report["solutions"] = {"degenerate": {
            "radius": sol.radius,
            "samples": [M.tolist() for M in _degenerate_samples(sol, samples)],
        }}
        report["residuals"] = []
    else:
        report["solutions"] = [
            {"matrix": s.X.tolist(), "root": s.root, "tangent": s.tangent,
             "residual": s.residual, "ill_conditioned": s.ill_conditioned}
            for s in sol
        ]
        report["residuals"] = [s.residual for s in sol]
    report["timing_ms"] = (time.perf_counter() - t) * 1e3
    return report


def classify_report(params: SolverParams, y: float) -> dict:
    label = classify(params, y)
    return {
        "case": label.letter,
        "expected_count": label.expected_solution_count,
        "expected_root_count": label.expected_root_count,
        "radius": label.radius,
        "y": y,
        "thresholds": _thresholds(params),
    }


def _matrix_text(M, indent="    ") -> str:
    return "\n".join(indent + "  ".join(f"{v:>12.6g}" for v in row) for row in M)


def _solve_text(r: dict) -> str:
    count = "infinite" if r["expected_count"] is None else r["expected_count"]
    lines = [f"case {r['case']}: {count} solution(s), norm {r['norm']}, ||Y|| = {_fmt(r['y'])}"]
    if r["thresholds"]:
        lines.append("thresholds: " + ", ".join(f"{k} = {_fmt(v)}" for k, v in r["thresholds"].items()))
    lines.append("roots: " + ", ".join(
        f"{_fmt(x['x'])} ({x['sign']}{', tangent' if x['tangent'] else ''})" for x in r["roots"]))
    sols = r["solutions"]
    if isinstance(sols, dict):
        d = sols["degenerate"]
        lines.append(f"degenerate: {{0}} ∪ sphere radius {d['radius']!r}")
        for k, M in enumerate(d["samples"], 1):
            lines.append(f"  sample {k}:")
            lines.append(_matrix_text(M))
    else:
        for k, s in enumerate(sols, 1):
            tag = ", tangent" if s["tangent"] else ""
            lines.append(f"solution {k}: root {_fmt(s['root'])}{tag}, residual {s['residual']:.3g}")
            lines.append(_matrix_text(s["matrix"]))
    lines.append(f"time: {r['timing_ms']:.3f} ms")
    return "\n".join(lines)


def _classify_text(r: dict) -> str:
    count = "infinite" if r["expected_count"] is None else r["expected_count"]
    lines = [f"case {r['case']}: {count} solution(s), {r['expected_root_count']} scalar root(s)"]
    if r["radius"] is not None:
        lines.append(f"radius: {r['radius']!r}")
    if r["thresholds"]:
        lines.append("thresholds: " + ", ".join(f"{k} = {_fmt(v)}" for k, v in r["thresholds"].items()))
    return "\n".join(lines)


def _emit(report: dict, fmt: str, text_fn, out) -> None:
    if fmt == "json":
        # json writes floats via repr, which round-trips doubles exactly
        json.dump(report, out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        out.write(text_fn(report) + "\n")


# -- commands --------------------------------------------------------------

def cmd_solve(args, out) -> int:
    report = solve_report(_params(args), _matrix_arg(args), _norm(args.norm), args.samples, args.method)
    _emit(report, args.format, _solve_text, out)
    return 0


def cmd_classify(args, out) -> int:
    params = _params(args)
    if args.y is not None:
        y = args.y
    else:
        y = norm(_matrix_arg(args), _norm(args.norm))
    if not y >= 0.0:
        raise UsageError("--y must be >= 0")
    _emit(classify_report(params, y), args.format, _classify_text, out)
    return 0


def cmd_sample(args, out) -> int:
    kind = _norm(args.norm)
    if args.radius is not None:
        radius = args.radius
    elif args.a is not None and args.b is not None:
        params = _params(args)
        radius = params.b * math.log(abs(params.a)) if params.a != 0 else -math.inf
        if not radius > 0:
            raise UsageError(f"b*ln|a| = {radius!r} is not positive; no degenerate set")
    else:
        raise UsageError("sample needs --radius or both --a and --b")
    cs = args.c if args.c else list(np.linspace(0.0, radius, args.count))
    m, n = args.shape
    mats = [sample_degenerate(kind, radius, c, m, n) for c in cs]
    report = {"radius": radius, "norm": kind,
              "samples": [{"c": float(c), "matrix": M.tolist(), "norm_value": norm(M, kind)}
                          for c, M in zip(cs, mats)]}

    def text(r):
        lines = [f"sphere radius {r['radius']!r} ({r['norm']} norm)"]
        for s in r["samples"]:
            lines.append(f"c = {_fmt(s['c'])}, ||X|| = {_fmt(s['norm_value'])}")
            lines.append(_matrix_text(s["matrix"]))
        return "\n".join(lines)

    _emit(report, args.format, text, out)
    return 0


def cmd_simulate(args, out) -> int:
    config = StressStepConfig(args.dt, args.tau_p, args.sigma_c)
    driving = read_driving(args.driving)
    initial = read_matrix(args.initial) if args.initial else None
    if initial is not None and initial.shape != (3, 3):
        raise UsageError("--initial must be a 3x3 matrix")
    states = simulate(config, driving, initial=initial)
    if args.output == "-":
        write_trajectory_csv(out, states)
    else:
        with open(args.output, "w", newline="") as fh:
            write_trajectory_csv(fh, states)
        out.write(f"wrote {len(states)} steps to {args.output}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normeq", description="Solve (1 + a exp(-||X||/b)) X = Y.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, need_ab=True):
        p.add_argument("--a", type=float, required=need_ab)
        p.add_argument("--b", type=float, required=need_ab)
        p.add_argument("--norm", default="frobenius")
        p.add_argument("--format", choices=("text", "json"), default="text")

    def matrix_in(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--input", help="CSV or JSON matrix file")
        g.add_argument("--zero", nargs=2, type=int, metavar=("M", "N"))

    p = sub.add_parser("solve", help="solve the matrix equation")
    common(p)
    matrix_in(p)
    p.add_argument("--samples", type=int, default=3, help="representatives of a degenerate set")
    p.add_argument("--method", choices=("bracket", "newton"), default="bracket")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("classify", help="report the solvability case")
    common(p)
    p.add_argument("--y", type=float)
    matrix_in(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sample", help="matrices on the degenerate sphere")
    common(p, need_ab=False)
    p.add_argument("--radius", type=float)
    p.add_argument("--c", type=float, action="append")
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--shape", nargs=2, type=int, default=(2, 2), metavar=("M", "N"))
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="implicit-Euler stress relaxation")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--tau-p", type=float, required=True)
    p.add_argument("--sigma-c", type=float, required=True)
    p.add_argument("--driving", required=True)
    p.add_argument("--initial")
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: solve, classify, sample, simulate")
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except ConvergenceError as exc:
        err.write(f"error: solver failure: {exc}\n")
        return 1
    except NormEqError as exc:
        err.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
