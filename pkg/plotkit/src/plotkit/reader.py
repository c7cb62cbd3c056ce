"""CSV parsing for the benchmark result schema.

This package consumes the bench harness purely through its CSV files, so the
column contracts are restated here rather than imported. Two shapes exist:
the sweep table (one row per aggregated cell) and the histogram bin table
(one row per bar).

A file whose header or experiment column does not fit the requested figure
kind raises :class:`SchemaError`; an unreadable, empty, or numerically
malformed file raises :class:`DataError`. Command-line callers map those to
exit codes 2 and 1 respectively.
"""

import csv
from dataclasses import dataclass

SWEEP_COLUMNS = [
    "experiment",
    "design",
    "dictionary_kind",
    "estimator",
    "s",
    "m",
    "n",
    "nhat",
    "sigma2",
    "trials",
    "mse_mean",
    "mse_stderr",
    "sensed_energy_mean",
    "singular_trials",
    "seed",
]
HISTOGRAM_COLUMNS = ["design", "bin_left", "bin_right", "count"]

# figure kind -> experiment column values it accepts
KIND_EXPERIMENTS = {
    "mse_sweep": ("oracle_sweep", "recovery_sweep"),
    "ratio_sweep": ("dimension_ratio",),
    "energy_sweep": ("energy_sweep",),
}
RATIO_PREFIX = "ratio("


class SchemaError(ValueError):
    """The file's shape or experiment does not match the figure kind."""


class DataError(ValueError):
    """The file is empty, unreadable, or holds malformed values."""


@dataclass(frozen=True)
class Series:
    """One plottable line or bar group.

    For bar groups ``xs`` holds left bin edges and ``widths`` the bin
    widths; for lines ``widths`` is None and ``errs`` holds one standard
    error per point (zeros when the column is all zero).
    """

    label: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    errs: tuple[float, ...] | None = None
    widths: tuple[float, ...] | None = None


def _read_rows(path, columns):
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError:
        raise
    if not rows:
        raise DataError(f"{path}: empty file")
    if rows[0] != columns:
        raise SchemaError(
            f"{path}: header {rows[0]!r} does not match the expected "
            f"columns {columns!r}"
        )
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns):
            raise DataError(f"{path}: line {i} has {len(row)} fields, expected {len(columns)}")
    if len(rows) == 1:
        raise DataError(f"{path}: no data rows")
    return [dict(zip(columns, row)) for row in rows[1:]]


def _as_float(row, key, path):
    try:
        return float(row[key])
    except ValueError:
        raise DataError(f"{path}: malformed {key} value {row[key]!r}") from None


def _series_label(design, estimator):
    return design if estimator == "none" else f"{design} ({estimator})"


def read_histogram(path):
    """Bin table -> one bar Series per design, bins in file order."""
    out = {}
    for row in _read_rows(path, HISTOGRAM_COLUMNS):
        left = _as_float(row, "bin_left", path)
        right = _as_float(row, "bin_right", path)
        count = _as_float(row, "count", path)
        if right <= left:
            raise DataError(f"{path}: bin [{left}, {right}] is not increasing")
        out.setdefault(row["design"], []).append((left, right - left, count))
    return [
        Series(
            label=design,
            xs=tuple(b[0] for b in bins),
            ys=tuple(b[2] for b in bins),
            widths=tuple(b[1] for b in bins),
        )
        for design, bins in out.items()
    ]


def read_sweep(path, figure_kind):
    """Sweep table -> (line Series list, x column name) for the figure kind.

    The x column is ``n`` for ratio and energy sweeps; for MSE sweeps it is
    the grid axis that actually varies (``s`` unless only ``m`` does). The y
    column is ``sensed_energy_mean`` for energy sweeps and ``mse_mean``
    otherwise; ``mse_stderr`` always supplies the error bars. Ratio sweeps
    keep only the ratio rows (design label ``ratio(...)``), one series per
    estimator, matching the quantity that figure is about.
    """
    if figure_kind not in KIND_EXPERIMENTS:
        raise SchemaError(f"unknown figure kind {figure_kind!r}")
    rows = _read_rows(path, SWEEP_COLUMNS)
    allowed = KIND_EXPERIMENTS[figure_kind]
    experiments = {row["experiment"] for row in rows}
    if len(experiments) > 1:
        raise SchemaError(f"{path}: mixed experiment values {sorted(experiments)}")
    if not experiments <= set(allowed):
        raise SchemaError(
            f"{path}: experiment {next(iter(experiments))!r} cannot be drawn "
            f"as {figure_kind!r} (expects one of {allowed})"
        )
    if figure_kind == "ratio_sweep":
        rows = [row for row in rows if row["design"].startswith(RATIO_PREFIX)]
        if not rows:
            raise SchemaError(f"{path}: no ratio rows to draw")
    y_key = "sensed_energy_mean" if figure_kind == "energy_sweep" else "mse_mean"
    if figure_kind in ("ratio_sweep", "energy_sweep"):
        x_key = "n"
    else:
        s_values = {row["s"] for row in rows}
        m_values = {row["m"] for row in rows}
        x_key = "m" if len(m_values) > 1 and len(s_values) == 1 else "s"

    grouped = {}
    for row in rows:
        key = (row["design"], row["estimator"])
        point = (
            _as_float(row, x_key, path),
            _as_float(row, y_key, path),
            _as_float(row, "mse_stderr", path),
        )
        grouped.setdefault(key, []).append(point)
    series = []
    for (design, estimator), points in grouped.items():
        points.sort(key=lambda p: p[0])
        series.append(
            Series(
                label=_series_label(design, estimator),
                xs=tuple(p[0] for p in points),
                ys=tuple(p[1] for p in points),
                errs=tuple(p[2] for p in points),
            )
        )
    return series, x_key
