"""Figure rendering for experiment result CSVs."""

from .csvio import ResultTable, SchemaError, read_results
from .render import PlotSpec, plot_bias, plot_schedule

__all__ = [
    "PlotSpec",
    "ResultTable",
    "SchemaError",
    "plot_bias",
    "plot_schedule",
    "read_results",
]
