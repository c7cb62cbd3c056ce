"""Figure-rendering acceptance: every kind renders from the golden tables
and the plotted coordinates hash to exactly what the CSV says."""

import csv
import hashlib
import subprocess
import sys
from pathlib import Path

DATA = Path(__file__).parent / "data"


def independent_digest(path, figure_kind):
    """Digest recomputed here from the raw file, mirroring the documented
    contract: series sorted by label, points in plotted order, .17g floats."""
    with open(path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    series = {}
    if figure_kind == "histogram":
        for row in rows:
            point = (float(row["bin_left"]), float(row["count"]))
            series.setdefault(row["design"], []).append(point)
    else:
        x_key = "s" if figure_kind == "mse_sweep" else "n"
        y_key = "sensed_energy_mean" if figure_kind == "energy_sweep" else "mse_mean"
        for row in rows:
            if figure_kind == "ratio_sweep" and not row["design"].startswith("ratio("):
                continue
            label = (
                row["design"]
                if row["estimator"] == "none"
                else f"{row['design']} ({row['estimator']})"
            )
            series.setdefault(label, []).append(
                (float(row[x_key]), float(row[y_key]))
            )
        for points in series.values():
            points.sort()
    lines = []
    for label in sorted(series):
        lines.append(label)
        for x, y in series[label]:
            lines.append(f"{x:.17g} {y:.17g}")
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def test_criterion_12_rendering_preserves_every_plotted_value(tmp_path):
    jobs = {
        "histogram": DATA / "histogram_bins.csv",
        "mse_sweep": DATA / "oracle_sweep.csv",
        "ratio_sweep": DATA / "dimension_ratio.csv",
        "energy_sweep": DATA / "energy_sweep.csv",
    }
    for kind, table in jobs.items():
        out = tmp_path / f"{kind}.svg"
        proc = subprocess.run(
            [sys.executable, "-m", "plotkit.cli", kind, str(table), str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0
        reported = dict(
            line.split(" ", 1) for line in proc.stdout.splitlines()
        )["digest"]
        assert reported == independent_digest(table, kind)
