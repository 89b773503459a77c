"""Command-line front ends.

plot-bias --in a.csv [b.csv ...] --out fig.svg --guides 0.5,1.5,2.5
plot-schedule --in a.csv [b.csv ...] --out fig.svg

Exit codes: 0 success, 2 configuration or schema error.
"""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, plot_bias, plot_schedule


def _parser(prog: str, description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=prog, description=description)
    p.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="CSV",
        help="result files, one series each (legend follows this order)",
    )
    p.add_argument("--out", required=True, help="output image (.svg default, .png works)")
    p.add_argument("--guides", default="", help="comma-separated reference slopes")
    p.add_argument("--title", default="")
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")
    return p


def _spec(args) -> PlotSpec:
    guides = tuple(float(t) for t in args.guides.split(",") if t.strip())
    return PlotSpec(
        inputs=tuple(args.inputs),
        output=args.out,
        guide_slopes=guides,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
    )


def _run(render, parser, argv) -> int:
    args = parser.parse_args(argv)
    try:
        out = render(_spec(args))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def bias_main(argv=None) -> int:
    parser = _parser("plot-bias", "Log-log RMSE vs stepsize with reference-order guides.")
    return _run(plot_bias, parser, argv)


def schedule_main(argv=None) -> int:
    parser = _parser("plot-schedule", "RMSE vs epoch under a decreasing-stepsize schedule.")
    return _run(plot_schedule, parser, argv)
