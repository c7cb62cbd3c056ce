"""Offline renderer turning benchmark CSV sweeps into figures."""

from .reader import (
    DataError,
    HISTOGRAM_COLUMNS,
    SchemaError,
    Series,
    SWEEP_COLUMNS,
    read_histogram,
    read_sweep,
)
from .render import (
    FIGURE_KINDS,
    PlotJob,
    RenderResult,
    build_figure,
    coordinate_digest,
    csv_digest,
    extract_points,
    load_series,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "FIGURE_KINDS",
    "HISTOGRAM_COLUMNS",
    "PlotJob",
    "RenderResult",
    "SchemaError",
    "Series",
    "SWEEP_COLUMNS",
    "build_figure",
    "coordinate_digest",
    "csv_digest",
    "extract_points",
    "load_series",
    "read_histogram",
    "read_sweep",
    "render",
    "__version__",
]
