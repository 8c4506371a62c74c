"""Command line front end: plotkit --kind cdf|bar|overlay --in DIR... --out FILE."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, METRICS, FigureSpec, render
from .io import PlotkitError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from simulator result directories")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure kind")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        type=Path, metavar="DIR",
                        help="result directories (summary.json + CDF csv)")
    parser.add_argument("--metric", choices=sorted(METRICS), default="rate",
                        help="which per-UE distribution to draw (default rate)")
    parser.add_argument("--threshold", type=float,
                        help="draw a labeled threshold line at this value")
    parser.add_argument("--threshold-label",
                        help="legend label for the threshold line")
    parser.add_argument("--out", required=True, type=Path,
                        help="output image path (.png or .svg reproducible)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out=args.out, metric=args.metric,
                          threshold=args.threshold,
                          threshold_label=args.threshold_label)
        out = render(spec)
    except PlotkitError as exc:
        print(f"plotkit: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
