"""Deterministic Monte Carlo experiment harness with CSV output.

Five experiments are supported: ``histogram`` (Gram off-diagonal histograms
plus sensed energies for a fixed dictionary), ``oracle_sweep`` (oracle MSE
versus sparsity), ``recovery_sweep`` (practical-estimator MSE versus sparsity
or versus measurement count), ``dimension_ratio`` (optimized/Gaussian MSE
ratio versus signal dimension with a fresh dictionary per trial), and
``energy_sweep`` (sensed energy versus signal dimension).

Determinism contract: every random draw comes from a stream derived by
hashing (base_seed, purpose, axis coordinates, trial index), so a config
produces byte-identical CSVs regardless of worker count or execution order.
Signal and noise streams deliberately exclude the design label: designs are
compared on paired trials (common random numbers).

Aggregation: per-cell losses are recorded in trial order and reduced
sequentially; ``mse_stderr`` is sample-std/sqrt(trials) of the recorded
losses. Trials whose restricted Gram is numerically singular are excluded and
counted in ``singular_trials`` (in paired experiments the whole pair is
dropped). For ``energy_sweep`` rows the per-trial quantity is the sensed
energy itself: its mean is ``sensed_energy_mean`` and, the schema having no
dedicated energy-stderr column, its stderr is carried in ``mse_stderr``.
"""

from __future__ import annotations

import csv
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics, recovery
from .design import design_gaussian, design_tf1, design_tf2, gen_parseval_target
from .model import (
    DataFormatError,
    RandomStream,
    SignalModel,
    canonical_dictionary,
    gen_gaussian_dictionary,
    gen_sparse_signal,
    gen_specified_dictionary,
    measure,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "BenchRow",
    "HistogramRow",
    "SweepResult",
    "CSV_COLUMNS",
    "HISTOGRAM_COLUMNS",
    "RATIO_LABEL",
    "load_config",
    "config_from_dict",
    "default_epsilon",
    "run_histogram",
    "run_oracle_sweep",
    "run_recovery_sweep",
    "run_dimension_ratio",
    "run_energy_sweep",
    "run_experiment",
    "write_csv",
    "read_csv",
    "write_histogram_csv",
]

EXPERIMENTS = (
    "histogram",
    "oracle_sweep",
    "recovery_sweep",
    "dimension_ratio",
    "energy_sweep",
)

ESTIMATORS = ("oracle", "omp", "bpdn")

RATIO_LABEL = "ratio(tf2/gaussian)"

CSV_COLUMNS = (
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
)

HISTOGRAM_COLUMNS = ("design", "bin_left", "bin_right", "count")

_INT_COLUMNS = {"s", "m", "n", "nhat", "trials", "singular_trials", "seed"}

_TF1_LABEL = re.compile(r"^tf1\(alpha=([^()]+)\)$")
_SPECIFIED_LABEL = re.compile(r"^specified\(([^()]+)\)$")


class ConfigError(ValueError):
    """Raised when an experiment configuration fails validation."""


@dataclass(frozen=True)
class BenchRow:
    """One aggregated cell of a sweep, in CSV column order."""

    experiment: str
    design: str
    dictionary_kind: str
    estimator: str
    s: int
    m: int
    n: int
    nhat: int
    sigma2: float
    trials: int
    mse_mean: float
    mse_stderr: float
    sensed_energy_mean: float
    singular_trials: int
    seed: int


@dataclass(frozen=True)
class HistogramRow:
    design: str
    bin_left: float
    bin_right: float
    count: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[BenchRow, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see :func:`config_from_dict` for the
    JSON field vocabulary."""

    experiment: str
    designs: tuple[str, ...]
    dictionary_kind: str
    m: int
    trials: int = 1
    base_seed: int = 0
    sigma2: float = 0.0
    n: int | None = None
    nhat: int | None = None
    s: int | None = None
    sparsity_grid: tuple[int, ...] | None = None
    measurement_grid: tuple[int, ...] | None = None
    dimension_grid: tuple[int, ...] | None = None
    estimators: tuple[str, ...] = ()
    epsilon: float | None = None
    bins: int = 50
    workers: int = 1


def parse_design_label(label: str) -> tuple[str, float | None]:
    """Parse a design label into (method, alpha); labels are canonical CSV
    values: "gaussian", "tf2", "tf1(alpha=...)"."""
    if label in ("gaussian", "tf2"):
        return label, None
    match = _TF1_LABEL.match(label)
    if match:
        try:
            alpha = float(match.group(1))
        except ValueError:
            raise ConfigError(f"bad alpha in design label {label!r}") from None
        if not (math.isfinite(alpha) and alpha >= 0):
            raise ConfigError(f"alpha must be finite and >= 0 in {label!r}")
        return "tf1", alpha
    raise ConfigError(f"unknown design label {label!r}")


def _canonical_design_label(label: str) -> str:
    method, alpha = parse_design_label(label)
    if method == "tf1":
        return f"tf1(alpha={alpha:g})"
    return method


def parse_dictionary_kind(kind: str) -> tuple[str, float | None]:
    """Parse a dictionary kind into (name, ratio): "gaussian", "canonical",
    or "specified(RATIO)"."""
    if kind in ("gaussian", "canonical"):
        return kind, None
    match = _SPECIFIED_LABEL.match(kind)
    if match:
        try:
            ratio = float(match.group(1))
        except ValueError:
            raise ConfigError(f"bad ratio in dictionary kind {kind!r}") from None
        if not (0.0 < ratio <= 1.0):
            raise ConfigError(f"ratio must be in (0, 1] in {kind!r}")
        return "specified", ratio
    raise ConfigError(f"unknown dictionary kind {kind!r}")


def _canonical_dictionary_kind(kind: str) -> str:
    name, ratio = parse_dictionary_kind(kind)
    if name == "specified":
        return f"specified({ratio:g})"
    return name


_COMMON_KEYS = {
    "experiment",
    "designs",
    "dictionary_kind",
    "trials",
    "base_seed",
    "sigma2",
    "workers",
}

_ALLOWED_KEYS = {
    "histogram": _COMMON_KEYS | {"m", "n", "nhat", "bins"},
    "oracle_sweep": _COMMON_KEYS | {"m", "n", "nhat", "sparsity_grid", "estimators"},
    "recovery_sweep": _COMMON_KEYS
    | {
        "m",
        "n",
        "nhat",
        "s",
        "sparsity_grid",
        "measurement_grid",
        "estimators",
        "epsilon",
    },
    "dimension_ratio": _COMMON_KEYS
    | {"m", "s", "dimension_grid", "estimators", "epsilon"},
    "energy_sweep": _COMMON_KEYS | {"m", "dimension_grid"},
}


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"missing required config key {key!r}")
    return data[key]


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key {key!r} must be an integer, got {value!r}")
    return value


def _as_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"config key {key!r} must be finite")
    return value


def _as_grid(value, key: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"config key {key!r} must be a non-empty list")
    grid = tuple(_as_int(v, key) for v in value)
    if any(g < 1 for g in grid):
        raise ConfigError(f"config key {key!r} must contain positive integers")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"config key {key!r} must be strictly increasing")
    return grid


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build and validate a config from a JSON-style dict.

    Field vocabulary (unknown keys are errors): ``experiment``, ``designs``
    (list of design labels), ``dictionary_kind``, ``m``, ``n``, ``nhat``,
    ``s``, ``sigma2``, ``sparsity_grid`` / ``measurement_grid`` /
    ``dimension_grid`` (whichever the experiment sweeps), ``estimators``,
    ``trials``, ``base_seed``, ``epsilon``, ``bins``, ``workers``.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    experiment = _require(data, "experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    unknown = sorted(set(data) - _ALLOWED_KEYS[experiment])
    if unknown:
        raise ConfigError(
            f"unknown config key(s) for {experiment}: {', '.join(unknown)}"
        )

    designs_raw = _require(data, "designs")
    if not isinstance(designs_raw, list) or not designs_raw:
        raise ConfigError("designs must be a non-empty list of design labels")
    designs = tuple(_canonical_design_label(str(d)) for d in designs_raw)
    if len(set(designs)) != len(designs):
        raise ConfigError("designs contains duplicates")

    dictionary_kind = _canonical_dictionary_kind(str(_require(data, "dictionary_kind")))
    kind_name, _ = parse_dictionary_kind(dictionary_kind)

    cfg = ExperimentConfig(
        experiment=experiment,
        designs=designs,
        dictionary_kind=dictionary_kind,
        m=_as_int(_require(data, "m"), "m"),
        trials=_as_int(data.get("trials", 1), "trials"),
        base_seed=_as_int(data.get("base_seed", 0), "base_seed"),
        sigma2=_as_number(data.get("sigma2", 0.0), "sigma2"),
        n=_as_int(data["n"], "n") if "n" in data else None,
        nhat=_as_int(data["nhat"], "nhat") if "nhat" in data else None,
        s=_as_int(data["s"], "s") if "s" in data else None,
        sparsity_grid=_as_grid(data["sparsity_grid"], "sparsity_grid")
        if "sparsity_grid" in data
        else None,
        measurement_grid=_as_grid(data["measurement_grid"], "measurement_grid")
        if "measurement_grid" in data
        else None,
        dimension_grid=_as_grid(data["dimension_grid"], "dimension_grid")
        if "dimension_grid" in data
        else None,
        estimators=tuple(str(e) for e in data.get("estimators", [])),
        epsilon=_as_number(data["epsilon"], "epsilon") if "epsilon" in data else None,
        bins=_as_int(data.get("bins", 50), "bins"),
        workers=_as_int(data.get("workers", 1), "workers"),
    )
    _validate(cfg, kind_name)
    return cfg


def load_config(path) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def _validate(cfg: ExperimentConfig, kind_name: str) -> None:
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.sigma2 < 0:
        raise ConfigError("sigma2 must be >= 0")
    if cfg.bins < 1:
        raise ConfigError("bins must be >= 1")
    if cfg.m < 1:
        raise ConfigError("m must be >= 1")
    if cfg.epsilon is not None and cfg.epsilon < 0:
        raise ConfigError("epsilon must be >= 0")
    for est in cfg.estimators:
        if est not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {est!r}")
    if len(set(cfg.estimators)) != len(cfg.estimators):
        raise ConfigError("estimators contains duplicates")

    def need_fixed_dims():
        if cfg.n is None or cfg.nhat is None:
            raise ConfigError(f"{cfg.experiment} requires n and nhat")
        if not cfg.m <= cfg.n <= cfg.nhat:
            raise ConfigError(
                f"need m <= n <= nhat, got m={cfg.m}, n={cfg.n}, nhat={cfg.nhat}"
            )
        if kind_name == "canonical" and cfg.nhat != cfg.n:
            raise ConfigError("canonical dictionary requires nhat == n")

    if cfg.experiment == "histogram":
        need_fixed_dims()
    elif cfg.experiment == "oracle_sweep":
        need_fixed_dims()
        if cfg.sparsity_grid is None:
            raise ConfigError("oracle_sweep requires sparsity_grid")
        if cfg.estimators != ("oracle",):
            raise ConfigError('oracle_sweep requires estimators == ["oracle"]')
        if cfg.sparsity_grid[-1] >= cfg.m:
            raise ConfigError("sparsity_grid values must satisfy s < m")
    elif cfg.experiment == "recovery_sweep":
        need_fixed_dims()
        if (cfg.sparsity_grid is None) == (cfg.measurement_grid is None):
            raise ConfigError(
                "recovery_sweep requires exactly one of sparsity_grid or "
                "measurement_grid"
            )
        if not cfg.estimators:
            raise ConfigError("recovery_sweep requires estimators")
        if cfg.sparsity_grid is not None:
            if cfg.s is not None:
                raise ConfigError("s is not allowed with sparsity_grid")
            if cfg.sparsity_grid[-1] >= cfg.m:
                raise ConfigError("sparsity_grid values must satisfy s < m")
        else:
            if cfg.s is None:
                raise ConfigError("measurement_grid mode requires s")
            if cfg.s >= cfg.measurement_grid[0]:
                raise ConfigError("measurement_grid values must satisfy s < m")
            if cfg.measurement_grid[-1] > cfg.n:
                raise ConfigError("measurement_grid values must satisfy m <= n")
    elif cfg.experiment == "dimension_ratio":
        if set(cfg.designs) != {"tf2", "gaussian"}:
            raise ConfigError(
                'dimension_ratio requires designs == ["tf2", "gaussian"]'
            )
        if cfg.dimension_grid is None:
            raise ConfigError("dimension_ratio requires dimension_grid")
        if cfg.s is None:
            raise ConfigError("dimension_ratio requires s")
        if not cfg.estimators:
            raise ConfigError("dimension_ratio requires estimators")
        if cfg.s >= cfg.m:
            raise ConfigError("need s < m")
        if cfg.m > cfg.dimension_grid[0]:
            raise ConfigError("dimension_grid values must satisfy m <= n")
    elif cfg.experiment == "energy_sweep":
        if cfg.dimension_grid is None:
            raise ConfigError("energy_sweep requires dimension_grid")
        if cfg.m > cfg.dimension_grid[0]:
            raise ConfigError("dimension_grid values must satisfy m <= n")


def default_epsilon(sigma2: float, m: int) -> float:
    """Residual budget for noisy runs: the high-probability noise-norm bound
    ``sqrt(sigma2 * (m + 2 sqrt(2 m)))``."""
    if sigma2 == 0.0:
        return 0.0
    return math.sqrt(sigma2 * (m + 2.0 * math.sqrt(2.0 * m)))


def _derived_nhat(kind_name: str, n: int) -> int:
    # Overcomplete dimension-sweep kinds grow the representation by 20%.
    return n if kind_name == "canonical" else int(round(1.2 * n))


def _make_dictionary(kind: str, n: int, nhat: int, stream: RandomStream) -> np.ndarray:
    name, ratio = parse_dictionary_kind(kind)
    if name == "canonical":
        return canonical_dictionary(n)
    if name == "gaussian":
        return gen_gaussian_dictionary(n, nhat, stream)
    return gen_specified_dictionary(n, nhat, ratio, stream)


def _build_design(
    label: str, psi: np.ndarray, m: int, design_stream: RandomStream
) -> np.ndarray:
    method, alpha = parse_design_label(label)
    if method == "gaussian":
        return design_gaussian(m, psi.shape[0], design_stream.child("gaussian"))
    if method == "tf2":
        return design_tf2(psi, m, design_stream.child("tf2"))
    # The target stream excludes alpha so every tf1 variant in a run matches
    # the same target frame.
    target = gen_parseval_target(m, psi.shape[1], design_stream.child("target"))
    return design_tf1(psi, target, alpha)


def _map_ordered(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _mean_stderr(losses: list[float]) -> tuple[float, float]:
    if not losses:
        return 0.0, 0.0
    arr = np.asarray(losses, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _estimate(
    estimator: str,
    a: np.ndarray,
    y: np.ndarray,
    x,
    m: int,
    s: int,
    cfg: ExperimentConfig,
) -> np.ndarray:
    if estimator == "oracle":
        return recovery.oracle_ls(a, y, x.support).estimate
    if estimator == "omp":
        return recovery.omp(a, y, max_support=s, residual_tol=0.0).estimate
    eps = cfg.epsilon if cfg.epsilon is not None else default_epsilon(cfg.sigma2, m)
    return recovery.bpdn(a, y, recovery.BpdnParams(epsilon=eps)).estimate


def run_histogram(cfg: ExperimentConfig) -> tuple[SweepResult, tuple[HistogramRow, ...]]:
    """Off-diagonal Gram histogram and sensed energy per design on one fixed
    dictionary realization."""
    _expect(cfg, "histogram")
    root = RandomStream(cfg.base_seed)
    psi = _make_dictionary(cfg.dictionary_kind, cfg.n, cfg.nhat, root.child("dict"))
    rows: list[BenchRow] = []
    hist_rows: list[HistogramRow] = []
    for label in cfg.designs:
        phi = _build_design(label, psi, cfg.m, root.child("design", cfg.m))
        a = phi @ psi
        hist = metrics.offdiag_histogram(metrics.gram(a), cfg.bins)
        for left, right, count in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            hist_rows.append(HistogramRow(label, float(left), float(right), int(count)))
        rows.append(
            BenchRow(
                experiment="histogram",
                design=label,
                dictionary_kind=cfg.dictionary_kind,
                estimator="none",
                s=0,
                m=cfg.m,
                n=cfg.n,
                nhat=cfg.nhat,
                sigma2=cfg.sigma2,
                trials=1,
                mse_mean=0.0,
                mse_stderr=0.0,
                sensed_energy_mean=metrics.sensed_energy(phi, psi),
                singular_trials=0,
                seed=cfg.base_seed,
            )
        )
    return SweepResult(tuple(rows)), tuple(hist_rows)


def run_oracle_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Empirical oracle-LS MSE over a sparsity grid, fixed dictionary."""
    _expect(cfg, "oracle_sweep")
    return _run_fixed_dictionary_sweep(cfg)


def run_recovery_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Practical-estimator MSE over a sparsity or measurement grid, fixed
    dictionary."""
    _expect(cfg, "recovery_sweep")
    return _run_fixed_dictionary_sweep(cfg)


def _run_fixed_dictionary_sweep(cfg: ExperimentConfig) -> SweepResult:
    axis, grid = (
        ("s", cfg.sparsity_grid)
        if cfg.sparsity_grid is not None
        else ("m", cfg.measurement_grid)
    )
    root = RandomStream(cfg.base_seed)
    psi = _make_dictionary(cfg.dictionary_kind, cfg.n, cfg.nhat, root.child("dict"))
    rows: list[BenchRow] = []
    for label in cfg.designs:
        for point in grid:
            m = point if axis == "m" else cfg.m
            s = point if axis == "s" else cfg.s
            phi = _build_design(label, psi, m, root.child("design", m))
            a = phi @ psi
            energy = metrics.sensed_energy(phi, psi)
            model = SignalModel(cfg.nhat, s)

            def one_trial(t: int) -> dict[str, float | None]:
                x = gen_sparse_signal(model, root.child("signal", axis, point, t))
                y = measure(
                    phi, psi, x, cfg.sigma2, root.child("noise", axis, point, t)
                )
                out: dict[str, float | None] = {}
                for est in cfg.estimators:
                    try:
                        vec = _estimate(est, a, y, x, m, s, cfg)
                    except np.linalg.LinAlgError:
                        out[est] = None
                    else:
                        out[est] = float(np.sum((vec - x.dense()) ** 2))
                return out

            results = _map_ordered(one_trial, range(cfg.trials), cfg.workers)
            for est in cfg.estimators:
                losses = [r[est] for r in results if r[est] is not None]
                singular = sum(r[est] is None for r in results)
                mean, stderr = _mean_stderr(losses)
                rows.append(
                    BenchRow(
                        experiment=cfg.experiment,
                        design=label,
                        dictionary_kind=cfg.dictionary_kind,
                        estimator=est,
                        s=s,
                        m=m,
                        n=cfg.n,
                        nhat=cfg.nhat,
                        sigma2=cfg.sigma2,
                        trials=cfg.trials,
                        mse_mean=mean,
                        mse_stderr=stderr,
                        sensed_energy_mean=energy,
                        singular_trials=singular,
                        seed=cfg.base_seed,
                    )
                )
    return SweepResult(tuple(rows))


def run_dimension_ratio(cfg: ExperimentConfig) -> SweepResult:
    """Optimized-versus-Gaussian MSE ratio over growing dimension, fresh
    dictionary per trial.

    Per (estimator, n) the result carries three rows: the tf2 cell, the
    gaussian cell, and a ratio row labeled ``ratio(tf2/gaussian)`` whose
    mse_mean/mse_stderr hold the mean ratio and its paired delta-method
    standard error. Oracle losses use the closed-form per-support MSE (the
    noise expectation taken analytically); omp/bpdn losses are empirical.
    """
    _expect(cfg, "dimension_ratio")
    root = RandomStream(cfg.base_seed)
    kind_name, _ = parse_dictionary_kind(cfg.dictionary_kind)
    rows: list[BenchRow] = []
    for est in cfg.estimators:
        for n in cfg.dimension_grid:
            nhat = _derived_nhat(kind_name, n)
            model = SignalModel(nhat, cfg.s)

            def one_trial(t: int):
                psi = _make_dictionary(
                    cfg.dictionary_kind, n, nhat, root.child("dict", n, t)
                )
                x = gen_sparse_signal(model, root.child("signal", est, n, t))
                out = {}
                for label in ("tf2", "gaussian"):
                    if label == "tf2":
                        phi = design_tf2(psi, cfg.m, root.child("design", "tf2", n, t))
                    else:
                        phi = design_gaussian(
                            cfg.m, n, root.child("design", "gaussian", n, t)
                        )
                    a = phi @ psi
                    try:
                        if est == "oracle":
                            loss = metrics.oracle_mse_support(a, x.support, cfg.sigma2)
                        else:
                            y = measure(
                                phi, psi, x, cfg.sigma2, root.child("noise", est, n, t)
                            )
                            vec = _estimate(est, a, y, x, cfg.m, cfg.s, cfg)
                            loss = float(np.sum((vec - x.dense()) ** 2))
                    except np.linalg.LinAlgError:
                        out[label] = None
                        continue
                    out[label] = (loss, metrics.sensed_energy(phi, psi))
                return out

            results = _map_ordered(one_trial, range(cfg.trials), cfg.workers)
            paired = [r for r in results if r["tf2"] is not None and r["gaussian"] is not None]
            dropped = len(results) - len(paired)
            tf2_losses = [r["tf2"][0] for r in paired]
            g_losses = [r["gaussian"][0] for r in paired]
            for label, losses in (("tf2", tf2_losses), ("gaussian", g_losses)):
                mean, stderr = _mean_stderr(losses)
                energy = float(np.mean([r[label][1] for r in paired])) if paired else 0.0
                rows.append(
                    BenchRow(
                        experiment="dimension_ratio",
                        design=label,
                        dictionary_kind=cfg.dictionary_kind,
                        estimator=est,
                        s=cfg.s,
                        m=cfg.m,
                        n=n,
                        nhat=nhat,
                        sigma2=cfg.sigma2,
                        trials=cfg.trials,
                        mse_mean=mean,
                        mse_stderr=stderr,
                        sensed_energy_mean=energy,
                        singular_trials=dropped,
                        seed=cfg.base_seed,
                    )
                )
            ratio, ratio_stderr = _paired_ratio(tf2_losses, g_losses)
            rows.append(
                BenchRow(
                    experiment="dimension_ratio",
                    design=RATIO_LABEL,
                    dictionary_kind=cfg.dictionary_kind,
                    estimator=est,
                    s=cfg.s,
                    m=cfg.m,
                    n=n,
                    nhat=nhat,
                    sigma2=cfg.sigma2,
                    trials=cfg.trials,
                    mse_mean=ratio,
                    mse_stderr=ratio_stderr,
                    sensed_energy_mean=0.0,
                    singular_trials=dropped,
                    seed=cfg.base_seed,
                )
            )
    return SweepResult(tuple(rows))


def _paired_ratio(num_losses: list[float], den_losses: list[float]) -> tuple[float, float]:
    """Ratio of means with the delta-method stderr for paired samples."""
    if not num_losses or not den_losses:
        return 0.0, 0.0
    num = np.asarray(num_losses)
    den = np.asarray(den_losses)
    mn, md = float(num.mean()), float(den.mean())
    if md == 0.0:
        return 0.0, 0.0
    ratio = mn / md
    k = num.size
    if k < 2:
        return ratio, 0.0
    var_n = float(num.var(ddof=1))
    var_d = float(den.var(ddof=1))
    cov = float(np.cov(num, den, ddof=1)[0, 1])
    var_ratio = (
        var_n / md**2 + mn**2 * var_d / md**4 - 2.0 * mn * cov / md**3
    ) / k
    return ratio, math.sqrt(max(0.0, var_ratio))


def run_energy_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Mean sensed energy per design over growing dimension, fresh dictionary
    per trial (shared across designs within a trial)."""
    _expect(cfg, "energy_sweep")
    root = RandomStream(cfg.base_seed)
    kind_name, _ = parse_dictionary_kind(cfg.dictionary_kind)
    rows: list[BenchRow] = []
    for label in cfg.designs:
        for n in cfg.dimension_grid:
            nhat = _derived_nhat(kind_name, n)

            def one_trial(t: int) -> float:
                psi = _make_dictionary(
                    cfg.dictionary_kind, n, nhat, root.child("dict", n, t)
                )
                phi = _build_design(label, psi, cfg.m, root.child("design", n, t))
                return metrics.sensed_energy(phi, psi)

            energies = _map_ordered(one_trial, range(cfg.trials), cfg.workers)
            mean, stderr = _mean_stderr(energies)
            rows.append(
                BenchRow(
                    experiment="energy_sweep",
                    design=label,
                    dictionary_kind=cfg.dictionary_kind,
                    estimator="none",
                    s=0,
                    m=cfg.m,
                    n=n,
                    nhat=nhat,
                    sigma2=cfg.sigma2,
                    trials=cfg.trials,
                    mse_mean=0.0,
                    mse_stderr=stderr,
                    sensed_energy_mean=mean,
                    singular_trials=0,
                    seed=cfg.base_seed,
                )
            )
    return SweepResult(tuple(rows))


def _expect(cfg: ExperimentConfig, experiment: str) -> None:
    if cfg.experiment != experiment:
        raise ConfigError(
            f"config experiment is {cfg.experiment!r}, expected {experiment!r}"
        )


_RUNNERS = {
    "oracle_sweep": run_oracle_sweep,
    "recovery_sweep": run_recovery_sweep,
    "dimension_ratio": run_dimension_ratio,
    "energy_sweep": run_energy_sweep,
}


def run_experiment(cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Run the configured experiment and write its CSV artifacts into
    ``out_dir`` (created if missing). Returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    main_path = out_dir / f"{cfg.experiment}.csv"
    if cfg.experiment == "histogram":
        result, hist_rows = run_histogram(cfg)
        side_path = out_dir / "histogram_bins.csv"
        write_csv(result, main_path)
        write_histogram_csv(hist_rows, side_path)
        return [main_path, side_path]
    result = _RUNNERS[cfg.experiment](cfg)
    write_csv(result, main_path)
    return [main_path]


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(result: SweepResult, path) -> None:
    """Write a sweep to CSV with the fixed 15-column header; floats carry 17
    significant digits so the round trip is lossless."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow(
                _format_value(getattr(row, col)) for col in CSV_COLUMNS
            )


def read_csv(path) -> SweepResult:
    """Read a sweep CSV back, verifying the schema.

    Raises
    ------
    DataFormatError
        On an empty file, a wrong header (naming the missing columns), or a
        malformed value.
    """
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty CSV") from None
        if tuple(header) != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            if missing:
                raise DataFormatError(
                    f"{path}: missing column(s): {', '.join(missing)}"
                )
            raise DataFormatError(f"{path}: unexpected header {header}")
        rows = []
        for record in reader:
            if len(record) != len(CSV_COLUMNS):
                raise DataFormatError(f"{path}: wrong field count in row {record}")
            kwargs = {}
            for col, value in zip(CSV_COLUMNS, record):
                try:
                    if col in _INT_COLUMNS:
                        kwargs[col] = int(value)
                    elif col in ("experiment", "design", "dictionary_kind", "estimator"):
                        kwargs[col] = value
                    else:
                        kwargs[col] = float(value)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: malformed value {value!r} in column {col}"
                    ) from None
            rows.append(BenchRow(**kwargs))
    return SweepResult(tuple(rows))


def write_histogram_csv(rows, path) -> None:
    """Write histogram side-file rows (design, bin_left, bin_right, count)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTOGRAM_COLUMNS)
        for row in rows:
            writer.writerow(
                (
                    row.design,
                    _format_value(row.bin_left),
                    _format_value(row.bin_right),
                    str(row.count),
                )
            )
