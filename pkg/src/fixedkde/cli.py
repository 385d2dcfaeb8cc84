"""Command-line front end.

    fixedkde bandwidth --input data.txt --strategy fast --format json
    fixedkde compare   --input data.txt --strategy literal
    fixedkde kde       --input data.txt --output curve.csv
    fixedkde bench     --sizes 128,256,512,1024
    fixedkde remez-gen --degree 7
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .errors import EmptyInputError, ParseError
from .kde import kde_curve
from .oracle import compare
from .plugin import Dataset, Strategy, bandwidth
from .remez import remez_minimax


def _parse_number(token: str, line: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {token!r}", line)
    return v


def ingest(path: str | Path, fmt: str = "lines", column: str | int = 0) -> Dataset:
    """Read a sample from a text file.

    ``lines``: one number per line, blank lines ignored.
    ``csv``: comma-separated rows; ``column`` is a zero-based index or a
    header name.  A first row whose selected field is not numeric is taken
    as the header.
    """
    text = Path(path).read_text(encoding="utf-8")
    values = []
    if fmt == "lines":
        for lineno, line in enumerate(text.splitlines(), 1):
            token = line.strip()
            if token:
                values.append(_parse_number(token, lineno))
    elif fmt == "csv":
        rows = [line.split(",") for line in text.splitlines()]
        idx = column
        start = 0
        if rows:
            header = [c.strip() for c in rows[0]]
            if isinstance(column, str) and not column.lstrip("-").isdigit():
                if column not in header:
                    raise ParseError(f"column {column!r} not in header", 1)
                idx, start = header.index(column), 1
            else:
                idx = int(column)
                try:
                    float(header[idx])
                except (ValueError, IndexError):
                    start = 1
        for lineno, row in enumerate(rows[start:], start + 1):
            if not "".join(row).strip():
                continue
            if idx >= len(row):
                raise ParseError(f"missing column {idx}", lineno)
            values.append(_parse_number(row[idx].strip(), lineno))
    else:
        raise ValueError(f"unknown input format {fmt!r}")
    if len(values) < 2:
        raise EmptyInputError(f"{path}: need at least 2 values, got {len(values)}")
    return Dataset(tuple(values))


def _emit(payload, fmt: str, plain: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(plain)


def cmd_bandwidth(config: RunConfig) -> int:
    data = ingest(config.input, config.input_format, config.column)
    res = bandwidth(data, config.strategy, threads=config.threads)
    _emit(res.to_json(timing=config.timing), config.format, repr(float(res.h_final)))
    return 0


def cmd_compare(config: RunConfig) -> int:
    data = ingest(config.input, config.input_format, config.column)
    rep = compare(data, config.strategy, threads=config.threads)
    plain = "\n".join(
        [f"h_fixed {rep['h_fixed']!r}", f"h_ref {rep['h_ref']!r}", f"delta_percent {rep['delta_percent']:.3e}"]
    )
    _emit(rep, config.format, plain)
    return 0


def cmd_kde(config: RunConfig) -> int:
    data = ingest(config.input, config.input_format, config.column)
    h = config.h if config.h is not None else float(bandwidth(data, config.strategy).h_final)
    if config.grid_min is not None and config.grid_max is not None:
        grid = np.linspace(config.grid_min, config.grid_max, config.grid_points)
    else:
        grid = config.grid_points
    curve = kde_curve(data, h, grid)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            curve.write_csv(fh)
    else:
        curve.write_csv(sys.stdout)
    return 0


def cmd_bench(config: RunConfig) -> int:
    sizes = [int(s) for s in config.sizes.split(",") if s.strip()]
    strategies = [s.strip() for s in config.strategies.split(",") if s.strip()]
    rows = bench_mod.run_bench(sizes, strategies, repeats=config.repeats, seed=config.seed)
    plain = "\n".join(f"{r['n']:>6} {r['strategy']:<8} {r['seconds']:.6f}" for r in rows)
    _emit(rows, config.format, "     n strategy seconds\n" + plain)
    return 0


def cmd_remez(config: RunConfig) -> int:
    lo, hi = config.domain if config.domain else (-math.log(2) / 2, math.log(2) / 2)
    approx = remez_minimax(config.target, (lo, hi), config.degree)
    payload = approx.to_json()
    plain = "\n".join(payload["coefficients"]) + f"\n# max error {payload['certified_max_abs_error']:.3e}"
    _emit(payload, config.format, plain)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fixedkde", description="Fixed-point PLUGIN bandwidth selection")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp, strategy=True):
        sp.add_argument("--input", required=True)
        sp.add_argument("--input-format", choices=["lines", "csv"], default="lines")
        sp.add_argument("--column", default="0", help="csv column index or header name")
        if strategy:
            sp.add_argument("--strategy", choices=[s.value for s in Strategy], default="fast")
        sp.add_argument("--threads", type=int, default=1)

    def fmt_arg(sp, default="plain"):
        sp.add_argument("--format", choices=["json", "plain"], default=default)

    sp = sub.add_parser("bandwidth", help="compute the PLUGIN bandwidth")
    data_args(sp)
    fmt_arg(sp)
    sp.add_argument("--timing", action="store_true", help="include elapsed seconds in json")

    sp = sub.add_parser("compare", help="relative error against the binary64 reference")
    data_args(sp)
    fmt_arg(sp, "json")

    sp = sub.add_parser("kde", help="write a density curve as CSV")
    data_args(sp)
    sp.add_argument("--h", type=float, default=None, help="bandwidth (default: PLUGIN h)")
    sp.add_argument("--grid-points", type=int, default=512)
    sp.add_argument("--grid-min", type=float, default=None)
    sp.add_argument("--grid-max", type=float, default=None)
    sp.add_argument("--output", default=None)

    sp = sub.add_parser("bench", help="time each strategy over a list of sizes")
    sp.add_argument("--sizes", default=",".join(map(str, bench_mod.DEFAULT_SIZES)))
    sp.add_argument("--strategies", default="literal,minimal,fast")
    sp.add_argument("--repeats", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    fmt_arg(sp)

    sp = sub.add_parser("remez-gen", help="generate minimax coefficients as JSON")
    sp.add_argument("--target", default="exp")
    sp.add_argument("--degree", type=int, default=7)
    sp.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"))
    fmt_arg(sp, "json")
    return p


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    input_format: str = "lines"
    column: str | int = 0
    strategy: str = "fast"
    format: str = "plain"
    threads: int = 1
    timing: bool = False
    h: float | None = None
    grid_points: int = 512
    grid_min: float | None = None
    grid_max: float | None = None
    output: str | None = None
    sizes: str = ",".join(map(str, bench_mod.DEFAULT_SIZES))
    strategies: str = "literal,minimal,fast"
    repeats: int = 5
    seed: int = 0
    target: str = "exp"
    degree: int = 7
    domain: tuple[float, float] | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        kw = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__}
        col = kw.get("column", 0)
        if isinstance(col, str) and col.lstrip("-").isdigit():
            kw["column"] = int(col)
        if kw.get("domain") is not None:
            kw["domain"] = tuple(kw["domain"])
        return cls(**kw)


COMMANDS = {
    "bandwidth": cmd_bandwidth,
    "compare": cmd_compare,
    "kde": cmd_kde,
    "bench": cmd_bench,
    "remez-gen": cmd_remez,
}


def run(config: RunConfig) -> int:
    """Execute one command; module errors become exit status 1."""
    try:
        return COMMANDS[config.command](config)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"fixedkde: error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
