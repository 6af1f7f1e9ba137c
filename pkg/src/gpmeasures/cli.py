"""Command line front end: ``gpmeasures {compute,sweep,check,bench}``.

Exit codes: 0 success, 1 failed check, 2 bad input, 3 bad parameter.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import analysis, measures, properties
from .measures import Distribution, MeasureError, Tolerance, format_exponent

SCHEMA_VERSION = "1.0"
SCHEMA_PATH = Path(__file__).with_name("output.schema.json")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_PARAM = 3

NAIVE_CUTOFF = 20_000
BENCH_ALGOS = ("naive", "sorted", "moments")
MEASURES = ("gini", "gp", "angle", "angle-dispro", "cosine", "iid")

logger = logging.getLogger("gpmeasures")


class InputError(Exception):
    """Input could not be read or does not form a valid distribution."""


class ParamError(Exception):
    """A numeric parameter or tag is invalid."""


def format_value(value: float) -> str:
    """12 significant digits; always shows a decimal point for finite values."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".12g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


# --------------------------------------------------------------------------
# input parsing


def _parse_number(token: str, where: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"{where}: cannot parse {token.strip()!r} as a number") from None
    if not math.isfinite(value):
        raise InputError(f"{where}: value {token.strip()!r} is not finite")
    if value < 0:
        raise InputError(f"{where}: negative value {value!r}")
    return value


def parse_inline(text: str) -> list[float]:
    tokens = [t for t in text.split(",")]
    if not any(t.strip() for t in tokens):
        raise InputError("inline vector is empty")
    return [_parse_number(t, f"entry {i + 1}") for i, t in enumerate(tokens)]


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv(text: str, column: Optional[str] = None, source: str = "<csv>") -> list[float]:
    """Read one numeric column from comma-separated text.

    An optional single header row is recognised when any of its cells is not a
    number. Blank rows are skipped with a warning.
    """
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not any(cell.strip() for cell in row):
            logger.warning("%s: skipping blank row %d", source, lineno)
            continue
        rows.append((lineno, [cell.strip() for cell in row]))
    if not rows:
        raise InputError(f"{source}: no data rows")

    header = None
    if not all(_is_number(cell) for cell in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
        if not rows:
            raise InputError(f"{source}: header but no data rows")

    width = len(header) if header is not None else len(rows[0][1])
    if column is not None:
        if header is not None and column in header:
            idx = header.index(column)
        elif column.isdigit() and int(column) < width:
            idx = int(column)
        else:
            raise InputError(f"{source}: no column {column!r}")
    elif width == 1:
        idx = 0
    else:
        raise InputError(f"{source}: {width} columns present; select one with --column")

    values = []
    for lineno, row in rows:
        if idx >= len(row):
            raise InputError(f"{source}: row {lineno}: missing column {idx}")
        values.append(_parse_number(row[idx], f"{source}: row {lineno}"))
    return values


def read_json(text: str, column: Optional[str] = None, source: str = "<json>") -> list[float]:
    """Read a list of numbers, a dict of columns, or a list of records."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON: {exc}") from None
    if isinstance(data, dict):
        if column is None:
            if len(data) != 1:
                raise InputError(f"{source}: {len(data)} columns present; select one with --column")
            column = next(iter(data))
        if column not in data:
            raise InputError(f"{source}: no column {column!r}")
        data = data[column]
    if not isinstance(data, list):
        raise InputError(f"{source}: expected a list of numbers")
    values = []
    for i, item in enumerate(data):
        where = f"{source}: row {i + 1}"
        if isinstance(item, dict):
            if column is None or column not in item:
                raise InputError(f"{where}: record has no column {column!r}")
            item = item[column]
        if isinstance(item, bool) or not isinstance(item, (int, float, str)):
            raise InputError(f"{where}: cannot parse {item!r} as a number")
        values.append(_parse_number(str(item), where))
    return values


def load_values(inline: Optional[str], path: Optional[str], column: Optional[str]) -> Distribution:
    if (inline is None) == (path is None):
        raise InputError("give exactly one of an inline vector or an input file")
    if inline is not None:
        values = parse_inline(inline)
    else:
        if path == "-":
            text, source = sys.stdin.read(), "<stdin>"
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise InputError(f"cannot read {path}: {exc.strerror}") from None
            source = path
        reader = read_json if path.lower().endswith(".json") else read_csv
        values = reader(text, column, source)
    try:
        return Distribution(np.array(values, dtype=float))
    except MeasureError as exc:
        raise InputError(str(exc)) from None


def parse_p_list(text: str) -> list[float]:
    try:
        return [measures.parse_exponent(tok) for tok in text.split(",") if tok.strip()]
    except measures.InvalidExponent as exc:
        raise ParamError(str(exc)) from None


def parse_int_list(text: str, name: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ParamError(f"{name}: expected comma-separated integers, got {text!r}") from None


# --------------------------------------------------------------------------
# output


def _command_echo(args: argparse.Namespace) -> dict:
    echo = {"name": args.command}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func"):
            continue
        if isinstance(value, float) and math.isinf(value):
            value = format_exponent(value)
        echo[key] = value
    return echo


def _emit_json(args, results: list[dict], out) -> None:
    record = {"schema_version": SCHEMA_VERSION, "command": _command_echo(args), "results": results}
    json.dump(record, out, indent=2, allow_nan=False)
    out.write("\n")


def _emit_rows(header: Sequence[str], rows: Iterable[Sequence], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) if isinstance(v, float) else v for v in row])


# --------------------------------------------------------------------------
# commands


def _tolerance(args) -> Tolerance:
    try:
        return Tolerance(rel_eps=args.tol) if args.tol is not None else measures.DEFAULT_TOL
    except ValueError as exc:
        raise ParamError(str(exc)) from None


def cmd_compute(args, out) -> int:
    tol = _tolerance(args)
    if args.measure in ("angle-dispro", "cosine"):
        x = load_values(args.inline_x, args.input_x, args.column)
        y = load_values(args.inline_y, args.input_y, args.column)
        if x.n != y.n:
            raise InputError(f"vectors differ in length: {x.n} vs {y.n}")
        fn = measures.angle_disproportionality if args.measure == "angle-dispro" else measures.salton_cosine
        report = fn(x, y)
    else:
        d = load_values(args.inline, args.input, args.column)
        if args.measure == "gini":
            report = measures.gini_sorted(d)
        elif args.measure == "angle":
            report = measures.angle_inequality(d)
        elif args.measure == "iid":
            try:
                params = measures.IIDParams(float(args.alpha), float(args.beta))
            except (ValueError, MeasureError) as exc:
                raise ParamError(str(exc)) from None
            report = measures.iid_measure(d, params)
        else:
            if args.p is None:
                raise ParamError("--measure gp needs --p")
            (p,) = parse_p_list(args.p)
            report = measures.g_p(d, p, tol)
            if args.denominator == "unbiased":
                report = measures.MeasureReport(
                    report.value * analysis.unbiased_factor(d.n),
                    report.measure_id,
                    report.p_used,
                    report.n,
                    report.algorithm,
                    report.zeros,
                )

    if args.format == "json":
        _emit_json(args, [report.to_dict()], out)
    elif args.format == "csv":
        p = report.to_dict()["p_used"]
        _emit_rows(
            ("measure_id", "p", "n", "algorithm", "value"),
            [(report.measure_id, "" if p is None else json.dumps(p) if isinstance(p, dict) else p,
              report.n, report.algorithm, report.value)],
            out,
        )
    else:
        out.write(format_value(report.value) + "\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    ps = parse_p_list(args.p)
    if not ps:
        raise ParamError("--p needs at least one exponent")
    d = load_values(args.inline, args.input, args.column)
    table = analysis.p_sweep(d, ps, args.denominator, _tolerance(args))
    fit = None
    if args.fit:
        try:
            fit = analysis.fit_convergence(table)
        except analysis.DegenerateTable as exc:
            logger.warning("convergence fit skipped: %s", exc)
    if args.format == "json":
        results = [table.to_dict()] + ([fit.to_dict()] if fit else [])
        _emit_json(args, results, out)
    else:
        _emit_rows(("p", "value"), [(format_exponent(p), v) for p, v in table.rows], out)
        if fit:
            out.write(f"# limit={format_value(fit.limit)} rate={format_value(fit.rate)}\n")
    return EXIT_OK


def cmd_check(args, out) -> int:
    ps = parse_p_list(args.p) if args.p else None
    if args.trials < 1:
        raise ParamError("--trials must be positive")
    outcomes = properties.run_suite(args.suite, trials=args.trials, seed=args.seed, ps=ps, jobs=args.jobs)
    all_ok = all(o.ok for o in outcomes)
    if args.format == "json":
        _emit_json(args, [o.to_dict() for o in outcomes], out)
    else:
        for o in outcomes:
            if o.kind == "not_applicable":
                status = "N/A"
            elif o.kind == "witness_search":
                status = "FOUND" if o.passed else "MISSING"
            else:
                status = "PASS" if o.passed else "FAIL"
            out.write(f"{status:8s} {o.name}  deviation={format_value(o.deviation)} trials={o.trials}\n")
            if not o.ok and o.witness is not None:
                out.write("         witness: " + json.dumps(properties._jsonable(o.witness)) + "\n")
            elif o.kind == "witness_search" and o.witness is not None and "witnesses" in o.witness:
                first = properties._jsonable(o.witness["witnesses"][0])
                out.write(f"         witness: x={first['x']} y={first['y']} a={first['a']}"
                          f" G(x)={first['gini_x']:.4f} G(y)={first['gini_y']:.4f}"
                          f" G([x,a])={first['gini_xa']:.4f} G([y,a])={first['gini_ya']:.4f}\n")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _rel(a: float, b: float) -> float:
    return 0.0 if a == b else abs(a - b) / max(abs(a), abs(b))


def _time(fn, d, reps: int) -> tuple[float, float]:
    best, value = math.inf, math.nan
    for _ in range(reps):
        start = time.perf_counter()
        value = fn(d).value
        best = min(best, time.perf_counter() - start)
    return best, value


def run_bench(ns: Sequence[int], algos: Sequence[str], seed: int = 0, reps: int = 3,
              cutoff: int = NAIVE_CUTOFF) -> list[dict]:
    """Time each algorithm per size and compare fast paths to the pairwise oracle."""
    fns = {
        "naive": measures.gini_naive,
        "sorted": measures.gini_sorted,
        "moments": measures.g2_closed,
    }
    oracles = {
        "naive": measures.gini_naive,
        "sorted": measures.gini_naive,
        "moments": lambda d: measures.g_p_naive(d, 2),
    }
    rows = []
    for n in ns:
        d = properties.random_distribution(np.random.default_rng([seed, n]), n_range=(n, n))
        for algo in algos:
            row = {"n": n, "algorithm": algo, "seconds": None, "value": None,
                   "max_rel_disagreement": None, "status": "ok"}
            if algo == "naive" and n > cutoff:
                row["status"] = "skipped"
                rows.append(row)
                continue
            seconds, value = _time(fns[algo], d, reps)
            row.update(seconds=seconds, value=value)
            if n <= cutoff:
                reference = value if algo == "naive" else oracles[algo](d).value
                row["max_rel_disagreement"] = _rel(value, reference)
            rows.append(row)
    return rows


def cmd_bench(args, out) -> int:
    ns = parse_int_list(args.n, "--n")
    if not ns or min(ns) < 2:
        raise ParamError("--n values must be at least 2")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in BENCH_ALGOS]
    if unknown or not algos:
        raise ParamError(f"unknown algorithm tag(s) {unknown}; expected {BENCH_ALGOS}")
    if args.reps < 1:
        raise ParamError("--reps must be positive")
    rows = run_bench(ns, algos, args.seed, args.reps)
    worst = max((r["max_rel_disagreement"] or 0.0 for r in rows), default=0.0)
    if args.format == "json":
        _emit_json(args, rows, out)
    else:
        _emit_rows(
            ("n", "algorithm", "seconds", "max_rel_disagreement", "status"),
            [(r["n"], r["algorithm"], r["seconds"] if r["seconds"] is not None else "",
              r["max_rel_disagreement"] if r["max_rel_disagreement"] is not None else "", r["status"])
             for r in rows],
            out,
        )
    return EXIT_OK if worst <= 1e-10 else EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# parser


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--inline", help="comma-separated vector, e.g. 0,0,1")
    parser.add_argument("--input", help="CSV or JSON file ('-' reads CSV from stdin)")
    parser.add_argument("--column", help="column name (or 0-based index) in tabular input")


def _add_tol(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for counting zero entries (default 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpmeasures", description="G_p family of inequality measures.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute one measure")
    p.add_argument("--measure", choices=MEASURES, default="gini")
    p.add_argument("--p", help="exponent for --measure gp; 'inf' allowed")
    p.add_argument("--alpha", default="1", help="IID difference exponent")
    p.add_argument("--beta", default="1", help="IID mean exponent")
    p.add_argument("--denominator", choices=analysis.DENOMINATOR_MODES, default="def3")
    _add_input(p)
    p.add_argument("--inline-x", help="first vector for angle-dispro / cosine")
    p.add_argument("--inline-y", help="second vector for angle-dispro / cosine")
    p.add_argument("--input-x", help="file holding the first vector")
    p.add_argument("--input-y", help="file holding the second vector")
    _add_tol(p)
    p.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="G_p over a list of exponents")
    p.add_argument("--p", required=True, help="comma-separated exponents, e.g. 1,2,3,inf")
    p.add_argument("--denominator", choices=analysis.DENOMINATOR_MODES, default="def3")
    p.add_argument("--fit", action="store_true", help="also estimate the convergence rate")
    _add_input(p)
    _add_tol(p)
    p.add_argument("--format", choices=("plain", "csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run the property suite")
    p.add_argument("--suite", choices=properties.SUITES, default="all")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", help="comma-separated exponents overriding the suite defaults")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="time the algorithms against the pairwise oracle")
    p.add_argument("--n", default="1000", help="comma-separated sizes")
    p.add_argument("--algos", default="naive,sorted,moments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ParamError, measures.InvalidExponent, measures.InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
