"""figures <kind> --in <csv> --out <img>"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a figure from a lagheat CSV (no recomputation).",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="csv_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(kind=args.kind, csv_path=args.csv_path,
                                 out_path=args.out_path, title=args.title))
    except Exception as exc:  # no partial files on failure
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
