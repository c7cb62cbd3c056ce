"""Command-line interface.

Subcommands: ``design`` (build a sensing matrix for a dictionary file),
``analyze`` (frame metrics of a matrix), ``recover`` (single-instance sparse
recovery), ``bench`` (run a configured experiment), ``ric`` (exact restricted
isometry constant), ``strip`` (statistical RIP lower bound).

Exit codes: 0 on success, 1 on math or data failures (singularity,
non-convergence, malformed files, I/O), 2 on usage and config errors. Results
go to stdout with 17 significant digits; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, bench, metrics, recovery
from .design import (
    design_gaussian,
    design_tf1,
    design_tf2,
    gen_parseval_target,
    normalize_sensing,
)
from .model import (
    DataFormatError,
    RandomStream,
    check_dictionary,
    load_matrix,
    load_vector,
    save_matrix,
    save_vector,
)

__all__ = ["main"]


class UsageError(Exception):
    """Invalid flag combination or flag value; maps to exit code 2."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _print_kv(key: str, value) -> None:
    if isinstance(value, bool):
        print(f"{key} {'true' if value else 'false'}")
    elif isinstance(value, (int, np.integer)):
        print(f"{key} {int(value)}")
    elif isinstance(value, (tuple, list)):
        print(f"{key} {','.join(str(int(v)) for v in value)}")
    else:
        print(f"{key} {_fmt(value)}")


def cmd_design(args) -> int:
    psi = load_matrix(args.dict)
    check_dictionary(psi)
    n = psi.shape[0]
    if not 1 <= args.m <= n:
        raise UsageError(f"--m must be in [1, {n}], got {args.m}")
    if args.method == "tf1" and args.alpha is None:
        raise UsageError("--alpha is required for --method tf1")
    if args.alpha is not None and args.alpha < 0:
        raise UsageError("--alpha must be >= 0")
    root = RandomStream(args.seed)
    if args.method == "gaussian":
        phi = design_gaussian(args.m, n, root.child("design", "gaussian"))
    elif args.method == "tf2":
        phi = design_tf2(psi, args.m, root.child("design", "tf2"))
    else:
        # Target stream excludes alpha: reruns with different alpha share it.
        target = gen_parseval_target(args.m, psi.shape[1], root.child("target"))
        phi = design_tf1(psi, target, args.alpha)
    save_matrix(phi, args.out)
    a = phi @ psi
    _print_kv("sensed_energy", metrics.sensed_energy(phi, psi))
    _print_kv("mutual_coherence", metrics.mutual_coherence(a))
    return 0


def _parseval_defect(a: np.ndarray) -> float:
    m = a.shape[0]
    frame = a @ a.T
    scale = np.trace(frame) / m
    return float(np.linalg.norm(frame - scale * np.eye(m)))


def cmd_analyze(args) -> int:
    matrix = load_matrix(args.matrix)
    if args.dict is not None:
        psi = load_matrix(args.dict)
        check_dictionary(psi)
        if matrix.shape[1] != psi.shape[0]:
            raise ValueError(
                f"matrix has {matrix.shape[1]} columns but dictionary has "
                f"{psi.shape[0]} rows"
            )
        a = matrix @ psi
    else:
        a = matrix
    _print_kv("mutual_coherence", metrics.mutual_coherence(a))
    _print_kv("sensed_energy", float(np.sum(a * a)))
    _print_kv("parseval_defect", _parseval_defect(a))
    if args.s is not None:
        report = metrics.exact_ric(a, args.s)
        _print_kv("ric_delta", report.delta)
        _print_kv("ric_support", report.support)
    return 0


def cmd_recover(args) -> int:
    a = load_matrix(args.matrix)
    y = load_vector(args.y)
    if y.size != a.shape[0]:
        raise ValueError(
            f"y has {y.size} entries but the matrix has {a.shape[0]} rows"
        )
    if args.algo == "oracle":
        if args.support is None:
            raise UsageError("--support is required for --algo oracle")
        try:
            support = tuple(int(tok) for tok in args.support.split(",") if tok != "")
        except ValueError:
            raise UsageError(
                f"--support must be comma-separated integers, got {args.support!r}"
            ) from None
        result = recovery.oracle_ls(a, y, support)
    elif args.algo == "omp":
        if args.max_support is None:
            raise UsageError("--max-support is required for --algo omp")
        result = recovery.omp(a, y, args.max_support, residual_tol=args.residual_tol)
    else:
        if args.epsilon is None:
            raise UsageError("--epsilon is required for --algo bpdn")
        params = recovery.BpdnParams(
            epsilon=args.epsilon,
            max_iterations=args.max_iterations,
            tolerance=args.tolerance,
            penalty=args.penalty,
        )
        result = recovery.bpdn(a, y, params)
    save_vector(result.estimate, args.out)
    _print_kv("support", result.support)
    _print_kv("residual_norm", result.residual_norm)
    _print_kv("iterations", result.iterations)
    if not result.converged:
        print(
            "recovery did not converge; best residual "
            f"{_fmt(result.residual_norm)}",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_bench(args) -> int:
    cfg = bench.load_config(args.config)
    paths = bench.run_experiment(cfg, args.out)
    result = bench.read_csv(paths[0])
    print(" ".join(bench.CSV_COLUMNS))
    for row in result.rows:
        print(
            " ".join(
                bench._format_value(getattr(row, col)) for col in bench.CSV_COLUMNS
            )
        )
    for path in paths:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_ric(args) -> int:
    a = load_matrix(args.matrix)
    report = metrics.exact_ric(a, args.s)
    _print_kv("ric_delta", report.delta)
    _print_kv("ric_support", report.support)
    return 0


def cmd_strip(args) -> int:
    bound = metrics.strip_bound(args.mu, args.s, args.m, args.delta)
    _print_kv("lower_bound", bound.lower_bound)
    _print_kv("valid", bound.valid)
    _print_kv("vacuous", bound.vacuous)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framesense",
        description="Sensing-matrix design, frame metrics, and sparse recovery.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("design", help="build a sensing matrix for a dictionary")
    p.add_argument("--method", required=True, choices=("gaussian", "tf1", "tf2"))
    p.add_argument("--dict", required=True, help="dictionary file (matrix text)")
    p.add_argument("--m", required=True, type=int, help="number of measurements")
    p.add_argument("--alpha", type=float, help="tf1 regularization weight")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path for the matrix")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("analyze", help="print frame metrics of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dict", help="optional dictionary; metrics apply to matrix @ dict")
    p.add_argument("--s", type=int, help="also compute the exact order-s RIC")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("recover", help="recover a sparse vector from measurements")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True, help="measurement vector file")
    p.add_argument("--algo", required=True, choices=("oracle", "omp", "bpdn"))
    p.add_argument("--out", required=True, help="output path for the estimate")
    p.add_argument("--support", help="oracle: comma-separated column indices")
    p.add_argument("--max-support", type=int, help="omp: maximum support size")
    p.add_argument("--residual-tol", type=float, default=0.0, help="omp stop tolerance")
    p.add_argument("--epsilon", type=float, help="bpdn residual budget")
    p.add_argument("--max-iterations", type=int, default=5000)
    p.add_argument("--tolerance", type=float, default=1e-7)
    p.add_argument("--penalty", type=float, default=1.0)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bench", help="run a configured experiment")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", required=True, help="output directory for CSVs")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ric", help="exact restricted isometry constant")
    p.add_argument("--matrix", required=True)
    p.add_argument("--s", required=True, type=int)
    p.set_defaults(func=cmd_ric)

    p = sub.add_parser("strip", help="statistical RIP probability lower bound")
    p.add_argument("--mu", required=True, type=float)
    p.add_argument("--s", required=True, type=int)
    p.add_argument("--m", required=True, type=int)
    p.add_argument("--delta", required=True, type=float)
    p.set_defaults(func=cmd_strip)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (bench.ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, DataFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
