"""figkit command line: render figure layouts from scenario CSVs."""

from __future__ import annotations

import argparse
import sys

from .csvio import ColumnError
from .figures import FIGURE_IDS, FigureSpec, render


def main(argv=None):
    parser = argparse.ArgumentParser(prog="figkit")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a figure layout from CSV input")
    p.add_argument("--figure", required=True, choices=FIGURE_IDS)
    p.add_argument("--csv", action="append", required=True,
                   help="input CSV (repeat for two-input layouts)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--no-insets", action="store_true")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        figure=args.figure,
        csv_paths=tuple(args.csv),
        out_path=args.out,
        log_y=args.log_y,
        insets=not args.no_insets,
    )
    try:
        out, info = render(spec)
    except ColumnError as exc:
        print(f"figkit: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    if info["marker_times_fs"]:
        times = ", ".join(f"{t:.1f}" for t in info["marker_times_fs"])
        print(f"g2 peak markers at concurrence maxima: {times} fs")
    return 0


if __name__ == "__main__":
    sys.exit(main())
