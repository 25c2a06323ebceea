"""Command-line chart regeneration.

Example:
    plot --figure fig5 --panel median --in "results/fig5_*.csv" --out fig5a.png
"""
from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

from .core import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot", description="Regenerate charts from campaign CSV output")
    p.add_argument("--figure", required=True, choices=["fig3", "fig4", "fig5"])
    p.add_argument("--panel", required=True, choices=["median", "p10"])
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="CSV paths or globs, one campaign point per file")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--require-all-variants", action="store_true",
                   help="fail unless all six entrant variants are present")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    paths: list[Path] = []
    for pattern in args.inputs:
        hits = sorted(glob.glob(pattern))
        paths.extend(Path(h) for h in hits) if hits else paths.append(
            Path(pattern))
    try:
        spec = FigureSpec(figure=args.figure, panel=args.panel,
                          inputs=tuple(paths), output=Path(args.out),
                          require_all_variants=args.require_all_variants)
        image, table = render(spec)
    except (SchemaError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {image} and {table}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
