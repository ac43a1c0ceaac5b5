"""Command-line front end: ``run``, ``convert``, ``generate`` and ``sweep``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .core import Params
from .engine import ALGORITHMS, CSV_HEADER, INDEX_KINDS, format_pairs, run, sorted_pairs
from .errors import InvalidDecay, InvalidThreshold, SSSJError
from .io import GeneratorConfig, convert, generate_stream, read_stream, write_stream


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sssj", description="Streaming similarity self-join.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="join one stream file")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--format", choices=("text", "bin"), default=None)
    p.add_argument("--theta", required=True, type=float)
    p.add_argument("--lambda", dest="lam", required=True, type=float)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="str")
    p.add_argument("--index", choices=INDEX_KINDS, default="l2")
    p.add_argument("--pairs-out", type=Path, help="pairs file (default: stdout)")
    p.add_argument("--metrics-out", type=Path, help="metrics CSV (default: stderr)")

    c = sub.add_parser("convert", help="text <-> binary, direction taken from the input")
    c.add_argument("--in", dest="src", required=True, type=Path)
    c.add_argument("--out", dest="dst", required=True, type=Path)

    g = sub.add_parser("generate", help="write a synthetic stream")
    g.add_argument("--out", required=True, type=Path)
    g.add_argument("--format", choices=("text", "bin"), default="text")
    g.add_argument("--count", required=True, type=int)
    g.add_argument("--dims", required=True, type=int)
    g.add_argument("--avg-nnz", required=True, type=int)
    g.add_argument("--timestamps", choices=("sequential", "poisson"), default="sequential")
    g.add_argument("--rate", type=float, default=1.0)
    g.add_argument("--step", type=float, default=1.0)
    g.add_argument("--dim-distribution", choices=("uniform", "zipf"), default="uniform")
    g.add_argument("--zipf-exponent", type=float, default=1.1)
    g.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("sweep", help="metrics for every (theta, lambda) cell")
    s.add_argument("--input", required=True, type=Path)
    s.add_argument("--format", choices=("text", "bin"), default=None)
    s.add_argument("--thetas", required=True, type=_float_list)
    s.add_argument("--lambdas", required=True, type=_float_list)
    s.add_argument("--algorithm", choices=ALGORITHMS, default="str")
    s.add_argument("--index", choices=INDEX_KINDS, default="l2")
    s.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    for sp in (p, c, g, s):
        sp.set_defaults(subparser=sp)
    return parser


def _params_or_usage(parser, theta: float, lam: float) -> Params:
    try:
        return Params(theta, lam)
    except (InvalidThreshold, InvalidDecay) as exc:
        parser.error(f"{type(exc).__name__}: {exc}")


def _emit(path: Path | None, text: str, fallback) -> None:
    if path is None:
        fallback.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _cmd_run(args, parser) -> int:
    params = _params_or_usage(parser, args.theta, args.lam)
    items = read_stream(args.input, args.format)
    result = run(args.algorithm, items, params, args.index)
    _emit(args.pairs_out, format_pairs(sorted_pairs(result.pairs)), sys.stdout)
    _emit(args.metrics_out, CSV_HEADER + "\n" + result.metrics.csv_row() + "\n", sys.stderr)
    return 0


def _cmd_convert(args, parser) -> int:
    convert(args.src, args.dst)
    return 0


def _cmd_generate(args, parser) -> int:
    try:
        config = GeneratorConfig(
            count=args.count,
            dims=args.dims,
            avg_nnz=args.avg_nnz,
            timestamps=args.timestamps,
            rate=args.rate,
            step=args.step,
            dim_distribution=args.dim_distribution,
            zipf_exponent=args.zipf_exponent,
            seed=args.seed,
        )
    except ValueError as exc:
        parser.error(str(exc))
    write_stream(args.out, generate_stream(config), args.format)
    return 0


def _cmd_sweep(args, parser) -> int:
    grid = [(t, l) for t in args.thetas for l in args.lambdas]
    if not grid:
        parser.error("empty parameter grid")
    cells = [_params_or_usage(parser, t, l) for t, l in grid]
    items = read_stream(args.input, args.format)
    rows = [CSV_HEADER]
    for params in cells:
        rows.append(run(args.algorithm, items, params, args.index).metrics.csv_row())
    _emit(args.out, "\n".join(rows) + "\n", sys.stdout)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "convert": _cmd_convert,
    "generate": _cmd_generate,
    "sweep": _cmd_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, args.subparser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (SSSJError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
