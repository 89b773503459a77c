"""Figure assembly and reproducible SVG output.

Everything that affects layout is pinned in _RC (fonts, sizes, DPI) and the
SVG id hash salt is fixed, so rendering the same CSVs twice yields identical
bytes. Dates are stripped from the output metadata for the same reason.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .csvio import ResultTable, SchemaError, finite_positive, read_results

_RC = {
    "figure.dpi": 100,
    "figure.figsize": (6.4, 4.8),
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "axes.titlesize": 11.0,
    "legend.fontsize": 8.5,
    "svg.hashsalt": "artifact-plots",
    "svg.fonttype": "none",
}

_GUIDE_COLOR = "0.45"


@dataclass
class PlotSpec:
    inputs: tuple
    output: str
    guide_slopes: tuple = ()
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        self.inputs = tuple(str(p) for p in self.inputs)
        if not self.inputs:
            raise ValueError("need at least one input CSV")
        self.guide_slopes = tuple(float(s) for s in self.guide_slopes)
        if any(not math.isfinite(s) for s in self.guide_slopes):
            raise ValueError("guide slopes must be finite")


def _fit_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((a - mx) ** 2 for a in lx)
    sxy = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    return sxy / sxx


def _series(table: ResultTable, xcol: str):
    xs = table.column(xcol)
    ys = table.column("rmse")
    errs = table.columns.get("stderr")
    if errs is None:
        warnings.warn(f"{table.path}: no stderr column; error bars omitted")
    xs, ys, errs = finite_positive(xs, ys, errs)
    if not xs:
        raise SchemaError(f"{table.path}: no plottable rows")
    return xs, ys, errs


def _draw(ax, xs, ys, errs, label, marker="o"):
    if errs is None:
        ax.plot(xs, ys, marker=marker, markersize=3.5, linewidth=1.2, label=label)
    else:
        ax.errorbar(
            xs, ys, yerr=errs, marker=marker, markersize=3.5, linewidth=1.2,
            capsize=2.5, label=label,
        )


def _save(fig, output: str):
    fmt = Path(output).suffix.lstrip(".").lower() or "svg"
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(output, format=fmt, metadata=metadata)
    plt.close(fig)


def build_bias_figure(spec: PlotSpec):
    """Log-log RMSE against stepsize, one series per input file."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        anchor = None
        h_lo, h_hi = math.inf, 0.0
        for path in spec.inputs:
            table = read_results(path)
            xs, ys, errs = _series(table, "h")
            label = table.label()
            if len(xs) >= 2:
                label += f" (slope {_fit_slope(xs, ys):.2f})"
            _draw(ax, xs, ys, errs, label)
            i0 = min(range(len(xs)), key=xs.__getitem__)
            if anchor is None:
                anchor = (xs[i0], ys[i0])
            h_lo = min(h_lo, xs[i0])
            h_hi = max(h_hi, max(xs))
        for p in spec.guide_slopes:
            x0, y0 = anchor
            ax.plot(
                [h_lo, h_hi],
                [y0 * (h_lo / x0) ** p, y0 * (h_hi / x0) ** p],
                linestyle="--", linewidth=0.9, color=_GUIDE_COLOR,
                label=f"slope {p:g}",
            )
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(spec.xlabel or "stepsize h")
        ax.set_ylabel(spec.ylabel or "RMSE")
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(frameon=False)
        fig.tight_layout()
        return fig


def build_schedule_figure(spec: PlotSpec):
    """RMSE against epoch on a logarithmic y axis, one series per input."""
    if spec.guide_slopes:
        warnings.warn("guide slopes are not drawn on schedule plots")
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        for path in spec.inputs:
            table = read_results(path)
            xs, ys, errs = _series(table, "epochs")
            # one point per epoch: markers would shingle, draw plain lines
            _draw(ax, xs, ys, errs, table.label(), marker="")
        ax.set_yscale("log")
        ax.set_xlabel(spec.xlabel or "epoch")
        ax.set_ylabel(spec.ylabel or "RMSE")
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(frameon=False)
        fig.tight_layout()
        return fig


def plot_bias(spec: PlotSpec) -> str:
    with matplotlib.rc_context(_RC):
        _save(build_bias_figure(spec), spec.output)
    return spec.output


def plot_schedule(spec: PlotSpec) -> str:
    with matplotlib.rc_context(_RC):
        _save(build_schedule_figure(spec), spec.output)
    return spec.output
