"""Command-line entry point: ``plotkit <kind> --in <csv> [--overlay NAME] --out <img>``."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, OVERLAYS, PlotSpec, render


def build_parser():
    parser = argparse.ArgumentParser(prog="plotkit", description="Plot harness CSV output")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"render a {kind} plot")
        p.add_argument("--in", dest="input_path", required=True, help="input CSV file")
        p.add_argument("--out", dest="output_path", required=True, help="output image file")
        p.add_argument("--column", help="value column to plot (default: first value column)")
        if kind == "hist":
            p.add_argument(
                "--overlay",
                choices=sorted(OVERLAYS),
                help="overlay the named true density on the histogram",
            )
            p.add_argument("--bins", type=int, default=60)
        if kind == "acf":
            p.add_argument("--max-lag", type=int, default=50)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_path=args.input_path,
        kind=args.kind,
        output_path=args.output_path,
        column=args.column,
        overlay=getattr(args, "overlay", None),
        max_lag=getattr(args, "max_lag", 50),
        bins=getattr(args, "bins", 60),
    )
    try:
        meta = render(spec)
    except (ValueError, OSError) as exc:
        print(f"plotkit error: {exc}", file=sys.stderr)
        return 2
    parts = [f"wrote {meta['output_path']}", f"column={meta['column']}", f"n={meta['n_points']}"]
    if "overlay_integral" in meta:
        parts.append(f"overlay integral={meta['overlay_integral']:.6f}")
    if "qq_max_abs_residual" in meta:
        parts.append(f"max line residual={meta['qq_max_abs_residual']:.3g}")
    print("  ".join(parts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
