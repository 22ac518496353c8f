"""Batch entry point: render every figure whose input CSVs exist.

Usage: ``macrogame-figures --in RUN_DIR --out FIG_DIR``. The run directory is
scanned for the documented CSV files; one image per applicable figure spec
lands in the output directory.
"""

from __future__ import annotations

import argparse
import sys

from .render import render
from .specs import SchemaError, default_specs


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="macrogame-figures",
        description="Render publication-style figures from macrogame CSV outputs.",
    )
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the CSV outputs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for rendered images")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    specs = default_specs(args.in_dir, args.out_dir)
    if not specs:
        print(f"error: no renderable CSV inputs under {args.in_dir}", file=sys.stderr)
        return 1
    failures = 0
    for spec in specs:
        try:
            result = render(spec)
        except SchemaError as exc:
            print(f"error: {spec.figure_id}: {exc}", file=sys.stderr)
            failures += 1
            continue
        print(f"{result.figure_id}: {result.path}")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
