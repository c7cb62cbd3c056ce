"""Tight-frame sensing-matrix design, frame metrics, sparse recovery, and a
deterministic Monte Carlo benchmark harness."""

__version__ = "0.1.0"

from .model import (
    DataFormatError,
    RandomStream,
    SignalModel,
    SparseSignal,
    canonical_dictionary,
    derive_stream_id,
    gen_gaussian_dictionary,
    gen_sparse_signal,
    gen_specified_dictionary,
    load_matrix,
    load_vector,
    measure,
    save_matrix,
    save_vector,
)
from .design import (
    design_gaussian,
    design_tf1,
    design_tf1_raw,
    design_tf2,
    design_tf2_raw,
    gen_parseval_target,
    normalize_sensing,
    tightness_objective,
)
from .metrics import (
    CoherenceReport,
    ExpectedMse,
    RicReport,
    StripBound,
    StripEstimate,
    bpdn_error_constants,
    coherence_report,
    empirical_strip,
    exact_ric,
    gram,
    mutual_coherence,
    offdiag_histogram,
    oracle_mse_expected,
    oracle_mse_support,
    rsnr,
    rsnr_db,
    sensed_energy,
    sensed_snr,
    strip_bound,
)
from .recovery import BpdnParams, RecoveryResult, bpdn, omp, oracle_ls
from .bench import (
    BenchRow,
    ConfigError,
    ExperimentConfig,
    SweepResult,
    config_from_dict,
    load_config,
    read_csv,
    run_dimension_ratio,
    run_energy_sweep,
    run_experiment,
    run_histogram,
    run_oracle_sweep,
    run_recovery_sweep,
    write_csv,
)

__all__ = [
    "__version__",
    "DataFormatError",
    "RandomStream",
    "SignalModel",
    "SparseSignal",
    "canonical_dictionary",
    "derive_stream_id",
    "gen_gaussian_dictionary",
    "gen_sparse_signal",
    "gen_specified_dictionary",
    "load_matrix",
    "load_vector",
    "measure",
    "save_matrix",
    "save_vector",
    "design_gaussian",
    "design_tf1",
    "design_tf1_raw",
    "design_tf2",
    "design_tf2_raw",
    "gen_parseval_target",
    "normalize_sensing",
    "tightness_objective",
    "CoherenceReport",
    "ExpectedMse",
    "RicReport",
    "StripBound",
    "StripEstimate",
    "bpdn_error_constants",
    "coherence_report",
    "empirical_strip",
    "exact_ric",
    "gram",
    "mutual_coherence",
    "offdiag_histogram",
    "oracle_mse_expected",
    "oracle_mse_support",
    "rsnr",
    "rsnr_db",
    "sensed_energy",
    "sensed_snr",
    "strip_bound",
    "BpdnParams",
    "RecoveryResult",
    "bpdn",
    "omp",
    "oracle_ls",
    "BenchRow",
    "ConfigError",
    "ExperimentConfig",
    "SweepResult",
    "config_from_dict",
    "load_config",
    "read_csv",
    "run_dimension_ratio",
    "run_energy_sweep",
    "run_experiment",
    "run_histogram",
    "run_oracle_sweep",
    "run_recovery_sweep",
    "write_csv",
]
