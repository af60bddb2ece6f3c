"""Command-line interface: ``mlynar {pmf,stats,sample,study}``.

CSV output always starts with a header row and uses ``.`` as decimal
point.  Commands producing several tables emit them as CSV blocks
separated by one empty line.  Exit status is 0 on success, 2 on usage
errors and 1 on numeric failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .asymptotics import LIMIT_MEAN
from .distribution import (
    DEFAULT_EPSILON,
    MAX_EXACT,
    MAX_FULL_TABLE,
    FaceCount,
    moments,
    modes,
    pmf_exact,
    pmf_recursive,
)
from .errors import MlynarError
from .sampler import METHODS, run_batch
from .study import (
    DECADE_GRID,
    GridSpec,
    conjecture_table,
    delta_curve,
    distance_curve,
    fit_power_law,
)

DEFAULT_GRIDS = {
    "delta-fit": DECADE_GRID,
    "distance": GridSpec.parse("2..6"),
    "conjecture": GridSpec.parse("1..10"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class OutputFormat:
    kind: str = "csv"
    precision: int = 12

    def __post_init__(self):
        if self.kind not in ("csv", "json"):
            raise UsageError(f"unknown format {self.kind!r}")
        if not 1 <= self.precision <= 17:
            raise UsageError(f"precision must be in [1, 17], got {self.precision}")


@dataclass
class Table:
    name: str
    header: list[str]
    rows: list[list]


def format_value(value, precision: int) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise FloatingPointError(f"non-finite result {value}")
        return format(value, f".{precision}g")
    if isinstance(value, (tuple, list)):
        return ";".join(format_value(v, precision) for v in value)
    return str(value)


def _json_value(value, precision: int):
    if isinstance(value, bool) or isinstance(value, int) or value is None:
        return value
    if isinstance(value, float):
        return float(format_value(value, precision))
    if isinstance(value, Fraction):
        return format_value(value, precision)
    if isinstance(value, (tuple, list)):
        return [_json_value(v, precision) for v in value]
    return str(value)


def render(tables: list[Table], fmt: OutputFormat) -> str:
    if fmt.kind == "csv":
        blocks = []
        for table in tables:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(table.header)
            for row in table.rows:
                writer.writerow([format_value(v, fmt.precision) for v in row])
            blocks.append(buf.getvalue())
        return "\n".join(blocks)
    objects = {
        t.name: [
            {h: _json_value(v, fmt.precision) for h, v in zip(t.header, row)} for row in t.rows
        ]
        for t in tables
    }
    payload = objects[tables[0].name] if len(tables) == 1 else objects
    return json.dumps(payload, indent=2) + "\n"


def parse_tables(text: str) -> list[list[list[str]]]:
    """Split emitted CSV back into blocks of rows (header first)."""
    return [list(csv.reader(io.StringIO(block))) for block in text.split("\n\n") if block]


def _face_count(text: str) -> int:
    """Accept ``25``, ``1e15``, ``10**15`` or ``1_000_000``."""
    text = text.strip().replace("_", "")
    try:
        if re.fullmatch(r"\d+", text):
            value = int(text)
        elif m := re.fullmatch(r"(\d+)\*\*(\d+)", text):
            value = int(m[1]) ** int(m[2])
        elif re.fullmatch(r"\d+(\.\d*)?[eE]\d+", text):
            value = Fraction(text)
            if value.denominator != 1:
                raise ValueError
            value = int(value)
        else:
            raise ValueError
        return FaceCount(value)
    except (ValueError, MlynarError):
        raise argparse.ArgumentTypeError(f"invalid face count {text!r}") from None


def _grid(text: str) -> GridSpec:
    try:
        return GridSpec.parse(text)
    except MlynarError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_pmf(args) -> list[Table]:
    n = args.n
    lo = args.k_min if args.k_min is not None else 1
    hi = args.k_max if args.k_max is not None else n
    if not 1 <= lo <= hi <= n:
        raise UsageError(f"k range {lo}..{hi} not within 1..{n}")
    if args.exact:
        if n > MAX_EXACT:
            raise UsageError(f"--exact requires n <= {MAX_EXACT}")
        probs = pmf_exact(n)
        rows = [[k, probs[k - 1]] for k in range(lo, hi + 1)]
        return [Table("pmf", ["k", "p"], rows)]
    epsilon = args.epsilon
    if epsilon is None:
        epsilon = 0.0 if n <= MAX_FULL_TABLE else DEFAULT_EPSILON
    table = pmf_recursive(n, epsilon)
    hi = min(hi, table.truncation_K)
    rows = [[k, float(table.probs[k - 1])] for k in range(lo, hi + 1)]
    return [Table("pmf", ["k", "p"], rows)]


def cmd_stats(args) -> list[Table]:
    n = args.n
    report = moments(n, exact=args.exact)
    row = [
        n,
        report.mean,
        report.variance,
        report.scaled_mean,
        report.scaled_variance,
        LIMIT_MEAN - report.scaled_mean,
        modes(n).modes,
    ]
    return [Table("stats", ["n", "mean", "variance", "h", "v", "delta", "modes"], [row])]


def cmd_sample(args) -> list[Table]:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    stats = run_batch(args.n, args.count, args.seed, args.method, workers=args.workers)
    tables = [
        Table(
            "sample",
            ["n", "method", "seed", "count", "mean", "variance"],
            [[args.n, args.method, args.seed, stats.count, stats.mean, stats.variance]],
        )
    ]
    if args.histogram:
        rows = [[g, c] for g, c in stats.histogram.items()]
        tables.append(Table("histogram", ["gain", "count"], rows))
    return tables


def cmd_study(args) -> list[Table]:
    grid = args.grid or DEFAULT_GRIDS[args.kind]
    if args.kind == "delta-fit":
        points = delta_curve(grid)
        fit = fit_power_law(points)
        return [
            Table("points", ["n", "delta"], [list(p) for p in points]),
            Table(
                "fit",
                ["alpha", "alpha_se", "beta", "beta_se", "c", "c_se", "n_points", "dof"],
                [[fit.alpha, fit.alpha_se, fit.beta, fit.beta_se, fit.c, fit.c_se,
                  fit.n_points, fit.dof]],
            ),
        ]
    if args.kind == "distance":
        rows = [[n, d, d * math.sqrt(n)] for n, d in distance_curve(grid)]
        return [Table("distance", ["n", "d", "d_sqrt_n"], rows)]
    rows = [list(r) for r in conjecture_table(grid)]
    return [Table("conjecture", ["n", "h", "delta", "delta_sqrt_n"], rows)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlynar", description="Mlynar distribution of the hyper-die game gain."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--precision", type=int, default=12, help="significant digits (1-17)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", parents=[common], help="tabulate P(G_n = k)")
    p.add_argument("--n", type=_face_count, required=True)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--exact", action="store_true", help=f"rational output, n <= {MAX_EXACT}")
    p.add_argument(
        "--epsilon",
        type=float,
        help=f"truncation precision (default 0 for n <= {MAX_FULL_TABLE}, else {DEFAULT_EPSILON})",
    )
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("stats", parents=[common], help="mean, variance, scaled moments, modes")
    p.add_argument("--n", type=_face_count, required=True)
    p.add_argument("--exact", action="store_true", help=f"rational moments, n <= {MAX_EXACT}")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo sample of gains")
    p.add_argument("--n", type=_face_count, required=True)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=METHODS, default="game")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--histogram", action="store_true", help="also emit gain counts")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("study", parents=[common], help="asymptotic studies")
    p.add_argument("kind", choices=tuple(DEFAULT_GRIDS))
    p.add_argument("--grid", type=_grid, help="decade exponents, e.g. 1..10 or 2,4,6")
    p.set_defaults(func=cmd_study)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fmt = OutputFormat(args.format, args.precision)
        if args.command == "stats" and args.exact and args.n > MAX_EXACT:
            raise UsageError(f"--exact requires n <= {MAX_EXACT}")
        text = render(args.func(args), fmt)
    except (UsageError, MlynarError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"{parser.prog}: numeric failure: {exc}", file=sys.stderr)
        return 1
    out.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
