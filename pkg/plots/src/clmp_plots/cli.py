"""Command-line entry point: `plot --csv results.csv --figure pmd_vs_antennas --out fig.png`."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a benchmark CSV to a line figure plus a diffable text sidecar.",
    )
    parser.add_argument("--csv", required=True, help="harness result CSV")
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES))
    parser.add_argument("--out", required=True, help="image path (.png, .pdf, .svg, ...)")
    parser.add_argument(
        "--log-y", action="store_true", help="force a log y-axis (default per figure)"
    )
    args = parser.parse_args(argv)
    try:
        image, sidecar = render(args.figure, args.csv, args.out, log_y=args.log_y)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {image} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
