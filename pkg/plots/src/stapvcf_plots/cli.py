"""Command line entry point: render one figure from CLI flags or a spec file."""
from __future__ import annotations

import argparse
import json
import sys

from .figures import FigureSpec, render
from .schemas import FIGURE_KINDS, SchemaError

EXIT_SCHEMA = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stapvcf-plot",
                                     description="Render a figure from stapvcf CSV tables")
    parser.add_argument("--spec", help="JSON file with FigureSpec fields")
    parser.add_argument("--kind", choices=FIGURE_KINDS)
    parser.add_argument("--input", action="append", default=[],
                        help="input CSV (repeatable)")
    parser.add_argument("--output", help="output image path")
    parser.add_argument("--db-floor", type=float, default=-80.0)
    parser.add_argument("--no-grid", action="store_true")
    parser.add_argument("--title", default=None)
    return parser


def spec_from_args(args) -> FigureSpec:
    if args.spec:
        with open(args.spec) as fh:
            raw = json.load(fh)
        return FigureSpec(**raw)
    if not (args.kind and args.input and args.output):
        raise ValueError("--kind, --input and --output are required without --spec")
    return FigureSpec(figure_kind=args.kind, inputs=args.input, output=args.output,
                      db_floor=args.db_floor, grid=not args.no_grid, title=args.title)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(spec_from_args(args))
    except (SchemaError, ValueError, FileNotFoundError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    extras = ", ".join(f"{k}={v}" for k, v in result.info.items())
    print(f"wrote {result.path}" + (f" ({extras})" if extras else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
