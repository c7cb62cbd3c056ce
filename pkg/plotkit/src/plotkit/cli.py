"""Command-line entry point: ``plotkit <figure_kind> <input.csv> <output>``.

Exit codes follow the usual convention: 0 on success, 2 for usage and
schema problems (wrong figure kind for the data, malformed header, bad
flags), 1 for unreadable or malformed input files.
"""

import argparse
import sys
from pathlib import Path

from .reader import DataError, SchemaError
from .render import FIGURE_KINDS, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render a benchmark CSV as a figure.",
    )
    parser.add_argument("figure_kind", choices=FIGURE_KINDS)
    parser.add_argument("input_csv", type=Path)
    parser.add_argument("output", type=Path)
    parser.add_argument(
        "--y-scale",
        choices=("log", "linear"),
        default=None,
        help="override the kind's default y axis scale",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(args.input_csv, args.figure_kind, args.output, args.y_scale)
        result = render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"digest {result.digest}")
    print(f"series {result.series}")
    print(f"points {result.points}")
    print(f"wrote {result.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
