"""Command-line front end.

Exit codes: 0 success, 1 diagnostics or validation failure, 2 usage error,
3 guard rejection (exhaustive search refused).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .features import FeatureError
from .hierarchy import HierarchyError, augment_singletons, compile_out, compile_out_weighted, validate
from .insertion import GuardError, exact_insert, greedy_insert, prune_redundant
from .textformat import HierarchyDocument, ParseError, dumps_entry, parse, render_compiled, render_entry

EXIT_OK, EXIT_DIAG, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class _UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _load(path: str) -> HierarchyDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}")
    return parse(text)


def _compiled(doc: HierarchyDocument, args: argparse.Namespace):
    if getattr(args, "weighted", False):
        return compile_out_weighted(doc.hierarchy, args.epsilon)
    return compile_out(doc.hierarchy)


def _instance(doc: HierarchyDocument, args: argparse.Namespace):
    if doc.object_decl(args.object) is None:
        raise _UsageError(f"no object named {args.object!r} in {args.file}")
    f = doc.object_spec(args.object)
    return f, augment_singletons(_compiled(doc, args), f)


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate(_load(args.file).hierarchy)
    for msg in report.messages():
        print(msg, file=sys.stderr)
    if report.ok:
        print("ok")
    return EXIT_OK if report.ok else EXIT_DIAG


def cmd_compile(args: argparse.Namespace) -> int:
    doc = _load(args.file)
    sys.stdout.write(render_compiled(_compiled(doc, args)))
    return EXIT_OK


def _emit(result, args: argparse.Namespace) -> None:
    trace = getattr(args, "trace", False)
    if args.json:
        sys.stdout.write(dumps_entry(result, trace=trace))
    else:
        sys.stdout.write(render_entry(result, trace=trace))


def cmd_insert(args: argparse.Namespace) -> int:
    f, n = _instance(_load(args.file), args)
    result = greedy_insert(f, n)
    if args.prune:
        result = prune_redundant(result, f, n)
    _emit(result, args)
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    f, n = _instance(_load(args.file), args)
    _emit(exact_insert(f, n, args.max_regular), args)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sweep = [
        bench.InstanceParams(
            n_attributes=args.n_attributes,
            n_values_per_attribute=args.n_values,
            n_regular_classes=n_regular,
            class_size_range=tuple(args.class_size),
            object_known_count=known,
            clash_density=0.0 if args.preset == "clashfree" else args.clash_density,
            seed=args.seed,
            preset=args.preset,
            blocks=blocks,
            nixon_pairs=args.nixon_pairs,
        )
        for n_regular in args.n_regular
        for known in args.known
        for blocks in args.blocks
    ]
    try:
        report = bench.measure(sweep, args.trials, exact=not args.no_exact, max_regular=args.max_regular)
    except ValueError as exc:
        raise _UsageError(str(exc))
    if args.out == "-":
        bench.write_csv(report, sys.stdout, timing=not args.no_timing)
    else:
        bench.write_csv(report, args.out, timing=not args.no_timing)
    summary = {
        "instances": len(report.rows),
        "max_ratio": report.max_ratio,
        "mean_ratio": report.mean_ratio,
        "violations": report.violations,
    }
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexinsert", description="Insert objects into default inheritance hierarchies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a hierarchy for cycles, dangling parents and ambiguity")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    def weighting(p: argparse.ArgumentParser) -> None:
        p.add_argument("--weighted", action="store_true", help="weight features by inheritance distance")
        p.add_argument("--epsilon", type=_fraction, default=None, help="per-link weight increment, e.g. 1/32")

    p = sub.add_parser("compile", help="print the compiled-out feature set of every class")
    p.add_argument("file")
    weighting(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("insert", help="insert an object with the greedy algorithm")
    p.add_argument("file")
    p.add_argument("--object", required=True)
    p.add_argument("--prune", action="store_true", help="remove redundant parent links afterwards")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    weighting(p)
    p.set_defaults(func=cmd_insert)

    p = sub.add_parser("exact", help="insert an object optimally by exhaustive search")
    p.add_argument("file")
    p.add_argument("--object", required=True)
    p.add_argument("--max-regular", type=int, default=20)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="greedy vs optimal on generated instances, as CSV")
    p.add_argument("--preset", choices=bench.PRESETS, default="uniform")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-attributes", type=int, default=20)
    p.add_argument("--n-values", type=int, default=3)
    p.add_argument("--n-regular", type=int, nargs="+", default=[10])
    p.add_argument("--class-size", type=int, nargs=2, default=[2, 6], metavar=("MIN", "MAX"))
    p.add_argument("--known", type=int, nargs="+", default=[12])
    p.add_argument("--clash-density", type=float, default=0.2)
    p.add_argument("--blocks", type=int, nargs="+", default=[4], help="staircase block counts")
    p.add_argument("--nixon-pairs", type=int, default=0)
    p.add_argument("--max-regular", type=int, default=20)
    p.add_argument("--no-exact", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="leave timing columns blank for reproducible output")
    p.add_argument("--out", required=True, help="CSV path, or - for standard output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_DIAG
    except HierarchyError as exc:
        for msg in exc.report.messages():
            print(msg, file=sys.stderr)
        return EXIT_DIAG
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (FeatureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAG


if __name__ == "__main__":
    sys.exit(main())
