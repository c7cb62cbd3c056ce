"""Figure construction and the plotted-coordinate digest.

Rendering is deterministic: a fixed Agg/SVG pipeline, a pinned
``svg.hashsalt``, and no embedded timestamps, so the same CSV always
produces byte-identical image files.

The digest contract: series are sorted by label; each contributes its label
line followed by one ``"<x> <y>"`` line per point in plotted order (file
order for histogram bars, ascending x for lines), floats formatted with
``.17g``; the lines are newline-joined, UTF-8 encoded, and hashed with
SHA-256. :func:`render` computes the digest from the matplotlib artists of
the finished figure, while :func:`csv_digest` computes it straight from the
file, so equality of the two proves the renderer did not alter any value.
"""

import hashlib
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotkit"

from matplotlib.figure import Figure

from .reader import SchemaError, read_histogram, read_sweep

FIGURE_KINDS = ("histogram", "mse_sweep", "ratio_sweep", "energy_sweep")
OUTPUT_SUFFIXES = (".svg", ".png")

_DEFAULT_Y_SCALE = {
    "histogram": "linear",
    "mse_sweep": "log",
    "ratio_sweep": "linear",
    "energy_sweep": "linear",
}
_Y_LABELS = {
    "histogram": "pair count",
    "mse_sweep": "MSE",
    "ratio_sweep": "MSE ratio",
    "energy_sweep": "sensed energy",
}
_X_LABELS = {
    "magnitude": "off-diagonal Gram magnitude",
    "s": "sparsity s",
    "m": "measurements m",
    "n": "signal dimension n",
}


@dataclass(frozen=True)
class PlotJob:
    """What to draw: input table, figure kind, output image, axis options."""

    input_csv: Path
    figure_kind: str
    output_image: Path
    y_scale: str | None = None

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.figure_kind!r}")
        if self.y_scale not in (None, "log", "linear"):
            raise ValueError(f"y_scale must be 'log' or 'linear', got {self.y_scale!r}")
        suffix = Path(self.output_image).suffix.lower()
        if suffix not in OUTPUT_SUFFIXES:
            raise SchemaError(
                f"unsupported output extension {suffix!r}; use one of {OUTPUT_SUFFIXES}"
            )


@dataclass(frozen=True)
class RenderResult:
    digest: str
    series: int
    points: int
    output: Path


def load_series(job: PlotJob):
    """Series list plus the name of the column drawn on the x axis."""
    if job.figure_kind == "histogram":
        return read_histogram(job.input_csv), "magnitude"
    return read_sweep(job.input_csv, job.figure_kind)


def build_figure(job: PlotJob):
    """Draw the series onto a fresh figure; returns (figure, axes, series)."""
    series, x_key = load_series(job)
    fig = Figure(figsize=(6.4, 4.8), dpi=100)
    ax = fig.add_subplot()
    if job.figure_kind == "histogram":
        for item in series:
            ax.bar(
                item.xs,
                item.ys,
                width=item.widths,
                align="edge",
                alpha=0.6,
                label=item.label,
            )
    else:
        for item in series:
            ax.errorbar(
                item.xs,
                item.ys,
                yerr=item.errs,
                marker="o",
                capsize=3,
                label=item.label,
            )
    scale = job.y_scale or _DEFAULT_Y_SCALE[job.figure_kind]
    if scale == "log" and min(min(item.ys) for item in series) <= 0.0:
        scale = "linear"
    ax.set_yscale(scale)
    ax.set_xlabel(_X_LABELS[x_key])
    ax.set_ylabel(_Y_LABELS[job.figure_kind])
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig, ax, series


def extract_points(ax):
    """Plotted (label, [(x, y), ...]) pairs read back off the axes artists."""
    out = []
    for container in ax.containers:
        label = container.get_label()
        if hasattr(container, "patches"):
            points = [
                (float(rect.get_x()), float(rect.get_height()))
                for rect in container.patches
            ]
        else:
            line = container[0]
            points = [
                (float(x), float(y))
                for x, y in zip(line.get_xdata(), line.get_ydata())
            ]
        out.append((label, points))
    return out


def coordinate_digest(labelled_points):
    """SHA-256 over the canonical text form of (label, points) pairs."""
    lines = []
    for label, points in sorted(labelled_points, key=lambda item: item[0]):
        lines.append(label)
        for x, y in points:
            lines.append(f"{float(x):.17g} {float(y):.17g}")
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def csv_digest(input_csv, figure_kind) -> str:
    """Digest of the coordinates the file says should be plotted."""
    job = PlotJob(Path(input_csv), figure_kind, Path("unused.svg"))
    series, _ = load_series(job)
    return coordinate_digest(
        [(item.label, list(zip(item.xs, item.ys))) for item in series]
    )


def render(job: PlotJob) -> RenderResult:
    """Draw, digest, and write the image; returns the digest and counts."""
    fig, ax, _ = build_figure(job)
    points = extract_points(ax)
    digest = coordinate_digest(points)
    out = Path(job.output_image)
    if out.suffix.lower() == ".svg":
        fig.savefig(out, metadata={"Date": None})
    else:
        fig.savefig(out)
    return RenderResult(
        digest=digest,
        series=len(points),
        points=sum(len(p) for _, p in points),
        output=out,
    )
