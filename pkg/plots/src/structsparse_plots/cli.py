"""Script entry point: plot <kind> <csv> <out.png>."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="structsparse-plot")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv")
    parser.add_argument("out")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(csv_path=args.csv, kind=args.kind, out_path=args.out))
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
