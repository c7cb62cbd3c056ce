"""Frame-quality and estimation-quality metrics.

Everything here operates on the equivalent matrix ``a = phi @ psi`` (or any
dense matrix): Gram/coherence statistics, exact small-scale restricted
isometry constants, closed-form oracle MSE, sensed energy and SNR, the
sparse-recovery error constants, a statistical restricted-isometry bound with
its empirical counterpart, and reconstruction SNR.

The closed-form oracle MSE for a known support J is
``sigma2 * trace(inv(a[:, J].T @ a[:, J]))``: the noise covariance of the
least-squares estimate restricted to J. Averaged over supports it lower-bounds
every practical estimator on the same ensemble, which is what makes it the
benchmark curve in the experiment harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .model import RandomStream, check_dictionary, check_matrix, check_sensing

__all__ = [
    "ENUMERATION_LIMIT",
    "CoherenceReport",
    "ExpectedMse",
    "Histogram",
    "RicReport",
    "StripBound",
    "StripEstimate",
    "gram",
    "mutual_coherence",
    "offdiag_histogram",
    "coherence_report",
    "oracle_mse_support",
    "oracle_mse_expected",
    "sensed_energy",
    "sensed_snr",
    "exact_ric",
    "bpdn_error_constants",
    "strip_bound",
    "empirical_strip",
    "rsnr",
    "rsnr_db",
]

# Condition number at or beyond this marks a restricted Gram as singular.
COND_LIMIT = 1e12

# Brute-force support enumeration refuses larger problems.
ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class Histogram:
    """Uniform-bin histogram: ``edges`` has one more entry than ``counts``.

    Bins are left-closed/right-open with the final bin closed.
    """

    edges: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class CoherenceReport:
    """Gram-matrix summary of an equivalent matrix."""

    mu: float
    histogram: Histogram
    gram_trace: float
    sensed_energy: float


@dataclass(frozen=True)
class RicReport:
    """Exact restricted isometry constant of order ``s`` and the support
    attaining it."""

    s: int
    delta: float
    support: tuple[int, ...]


@dataclass(frozen=True)
class ExpectedMse:
    """Support-averaged oracle MSE.

    ``stderr`` is 0 in exact mode; ``singular_trials`` counts sampled supports
    excluded because their restricted Gram was numerically singular.
    """

    value: float
    stderr: float
    singular_trials: int


@dataclass(frozen=True)
class StripBound:
    """Probabilistic restricted-isometry lower bound for coherence ``mu``,
    sparsity ``s``, ``m`` measurements, deviation ``delta``.

    ``valid`` reflects the bound's admissible delta range; ``vacuous`` marks
    parameter choices (s <= 2) where the bound degenerates to 0.
    """

    mu: float
    s: int
    m: int
    delta: float
    valid: bool
    vacuous: bool
    lower_bound: float


@dataclass(frozen=True)
class StripEstimate:
    """Monte Carlo estimate of the restricted-isometry event probability."""

    probability: float
    stderr: float
    trials: int


def gram(a) -> np.ndarray:
    """Column Gram matrix ``a.T @ a`` (symmetric positive semidefinite)."""
    a = check_matrix(a)
    return a.T @ a


def mutual_coherence(a, normalize_columns: bool = False) -> float:
    """Largest absolute off-diagonal Gram entry.

    Raw mode uses the columns as given; with ``normalize_columns`` the columns
    are scaled to unit norm first (zero columns are then an error).
    """
    a = check_matrix(a)
    if a.shape[1] < 2:
        raise ValueError("mutual coherence needs at least 2 columns")
    if normalize_columns:
        norms = np.linalg.norm(a, axis=0)
        if np.any(norms == 0.0):
            raise ValueError("zero column in normalized mode")
        a = a / norms
    q = np.abs(a.T @ a)
    np.fill_diagonal(q, 0.0)
    return float(q.max())


def offdiag_histogram(q, bins: int) -> Histogram:
    """Histogram of ``|q[i, j]|`` over the strict upper triangle.

    Uniform bins span [0, max |q[i, j]|]; when every off-diagonal is zero a
    unit-width range is used so all mass lands in bin 0. Counts always sum to
    ``n (n - 1) / 2``.
    """
    q = check_matrix(q)
    n = q.shape[0]
    if q.shape[1] != n:
        raise ValueError(f"histogram input must be square, got {q.shape}")
    if not np.allclose(q, q.T, atol=1e-9, rtol=0.0):
        raise ValueError("histogram input must be symmetric within 1e-9")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    vals = np.abs(q[np.triu_indices(n, k=1)])
    hi = float(vals.max()) if vals.size and vals.max() > 0.0 else 1.0
    edges = np.linspace(0.0, hi, bins + 1)
    counts, _ = np.histogram(vals, edges)
    return Histogram(edges, counts)


def coherence_report(a, bins: int = 50) -> CoherenceReport:
    """Bundle mu, off-diagonal histogram, Gram trace, and Frobenius energy."""
    a = check_matrix(a)
    q = gram(a)
    return CoherenceReport(
        mu=mutual_coherence(a),
        histogram=offdiag_histogram(q, bins),
        gram_trace=float(np.trace(q)),
        sensed_energy=float(np.sum(a * a)),
    )


def _restricted_gram(a: np.ndarray, support) -> np.ndarray:
    support = np.asarray(support, dtype=np.int64)
    if support.ndim != 1 or support.size == 0:
        raise ValueError("support must be a non-empty 1-D index set")
    if np.unique(support).size != support.size:
        raise ValueError("support contains repeated indices")
    if support.min() < 0 or support.max() >= a.shape[1]:
        raise ValueError("support indices out of range")
    sub = a[:, support]
    return sub.T @ sub


def oracle_mse_support(a, support, sigma2: float) -> float:
    """Closed-form oracle MSE on a known support:
    ``sigma2 * trace(inv(restricted Gram))``.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the restricted Gram has condition number >= 1e12; the message
        names the offending support.
    """
    a = check_matrix(a)
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    g = _restricted_gram(a, support)
    if np.linalg.cond(g) >= COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"restricted Gram is numerically singular on support "
            f"{tuple(int(i) for i in np.asarray(support))}"
        )
    return sigma2 * float(np.trace(np.linalg.inv(g)))


def oracle_mse_expected(
    a,
    s: int,
    sigma2: float,
    trials: int | None = None,
    rng: RandomStream | None = None,
) -> ExpectedMse:
    """Oracle MSE averaged over uniform size-s supports.

    Exact mode (``trials=None``) enumerates every support (refusing more than
    10^6) and aborts on any singular restricted Gram. Sampled mode draws
    ``trials`` supports from ``rng``, excludes singular ones with a count, and
    reports the standard error of the kept losses.
    """
    a = check_matrix(a)
    nhat = a.shape[1]
    if not 1 <= s <= nhat:
        raise ValueError(f"s must be in [1, nhat={nhat}], got {s}")
    if trials is None:
        if math.comb(nhat, s) > ENUMERATION_LIMIT:
            raise ValueError(
                f"comb(nhat={nhat}, s={s}) exceeds the enumeration limit "
                f"{ENUMERATION_LIMIT}"
            )
        losses = [
            oracle_mse_support(a, support, sigma2)
            for support in combinations(range(nhat), s)
        ]
        return ExpectedMse(float(np.mean(losses)), 0.0, 0)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if rng is None:
        raise ValueError("sampled mode requires a RandomStream")
    gen = rng.generator()
    losses = []
    singular = 0
    for _ in range(trials):
        support = np.sort(gen.choice(nhat, size=s, replace=False))
        try:
            losses.append(oracle_mse_support(a, support, sigma2))
        except np.linalg.LinAlgError:
            singular += 1
    if not losses:
        raise np.linalg.LinAlgError("every sampled support was singular")
    arr = np.asarray(losses)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return ExpectedMse(float(arr.mean()), stderr, singular)


def sensed_energy(phi, psi) -> float:
    """Energy delivered by the design on the dictionary: ``‖phi @ psi‖_F²``."""
    phi = check_sensing(phi)
    psi = check_dictionary(psi)
    if phi.shape[1] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: phi {phi.shape}, psi {psi.shape}")
    a = phi @ psi
    return float(np.sum(a * a))


def sensed_snr(phi, psi, sigma2: float) -> float:
    """Sensed energy per measurement over the noise floor:
    ``‖phi @ psi‖_F² / (m sigma2)``."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    phi = check_sensing(phi)
    return sensed_energy(phi, psi) / (phi.shape[0] * sigma2)


def exact_ric(a, s: int) -> RicReport:
    """Exact restricted isometry constant by support enumeration.

    ``delta = max over size-s supports of max |eigenvalue(restricted Gram) - 1|``.
    Refuses problems with more than 10^6 supports.
    """
    a = check_matrix(a)
    nhat = a.shape[1]
    if not 1 <= s <= nhat:
        raise ValueError(f"s must be in [1, nhat={nhat}], got {s}")
    if math.comb(nhat, s) > ENUMERATION_LIMIT:
        raise ValueError(
            f"comb(nhat={nhat}, s={s}) exceeds the enumeration limit "
            f"{ENUMERATION_LIMIT}"
        )
    best_delta = -1.0
    best_support: tuple[int, ...] = ()
    for support in combinations(range(nhat), s):
        sub = a[:, support]
        w = np.linalg.eigvalsh(sub.T @ sub)
        delta = float(np.max(np.abs(w - 1.0)))
        if delta > best_delta:
            best_delta = delta
            best_support = support
    return RicReport(s, best_delta, best_support)


def bpdn_error_constants(delta_2s: float) -> tuple[float, float]:
    """Error constants of the sparse-recovery guarantee for an order-2s
    restricted isometry constant ``delta_2s``:

    ``c1 = (2 + (2*sqrt(2) - 2) d) / (1 - (sqrt(2) + 1) d)``
    ``c2 = 4 * sqrt(1 + d) / (1 - (sqrt(2) + 1) d)``

    Valid for ``0 <= d < sqrt(2) - 1``; outside that range the guarantee is
    vacuous and a ValueError is raised.
    """
    limit = math.sqrt(2.0) - 1.0
    if not (0.0 <= delta_2s < limit):
        raise ValueError(
            f"delta_2s must be in [0, sqrt(2)-1 ~= {limit:.6f}), got {delta_2s}"
        )
    denom = 1.0 - (math.sqrt(2.0) + 1.0) * delta_2s
    c1 = (2.0 + (2.0 * math.sqrt(2.0) - 2.0) * delta_2s) / denom
    c2 = 4.0 * math.sqrt(1.0 + delta_2s) / denom
    return c1, c2


def strip_bound(mu: float, s: int, m: int, delta: float) -> StripBound:
    """Probability lower bound for the restricted-isometry event over random
    sign/support ensembles:

    ``1 - (s/2) ** (-(0.3894 delta - s/m)**2 / (36 mu**2 s ln(1 + s/2)))``

    valid when ``sqrt(237.42 mu**2 s ln(1 + s/2)) + 2.57 s/m <= delta < 1``.
    Invalid inputs yield ``valid=False`` rather than an error; ``s <= 2``
    makes the base (s/2) <= 1 and the bound degenerates to 0 (``vacuous``).
    """
    if not (
        mu > 0.0
        and s >= 1
        and m >= 1
        and math.isfinite(mu)
        and math.isfinite(delta)
    ):
        return StripBound(mu, s, m, delta, False, False, 0.0)
    # base (s/2) <= 1 degenerates the bound to <= 0 regardless of the
    # delta-range check, so the vacuous flag is decided first
    vacuous = s <= 2
    log_term = math.log(1.0 + 0.5 * s)
    low = math.sqrt(237.42 * mu * mu * s * log_term) + 2.57 * s / m
    if not low <= delta < 1.0:
        return StripBound(mu, s, m, delta, False, vacuous, 0.0)
    exponent = (0.3894 * delta - s / m) ** 2 / (36.0 * mu * mu * s * log_term)
    raw = 1.0 - (0.5 * s) ** (-exponent)
    return StripBound(mu, s, m, delta, True, vacuous or raw <= 0.0, max(0.0, raw))


def empirical_strip(
    a, s: int, delta: float, trials: int, rng: RandomStream
) -> StripEstimate:
    """Monte Carlo frequency of the restricted-isometry event.

    Per trial: a uniform size-s support, independent ±1 signs on unit
    magnitudes; success when ``|‖a @ x‖² − ‖x‖²| <= delta ‖x‖²``.
    """
    a = check_matrix(a)
    nhat = a.shape[1]
    if not 1 <= s <= nhat:
        raise ValueError(f"s must be in [1, nhat={nhat}], got {s}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    gen = rng.generator()
    hits = 0
    for _ in range(trials):
        support = gen.choice(nhat, size=s, replace=False)
        signs = gen.integers(0, 2, size=s) * 2.0 - 1.0
        energy = float(np.sum((a[:, support] @ signs) ** 2))
        if abs(energy - s) <= delta * s:
            hits += 1
    p = hits / trials
    stderr = math.sqrt(p * (1.0 - p) / trials)
    return StripEstimate(p, stderr, trials)


def rsnr(f, f_rec) -> float:
    """Reconstruction-to-error norm ratio ``‖f_rec‖ / ‖f - f_rec‖``.

    The numerator is deliberately the reconstruction. A zero error norm means
    perfect reconstruction and returns ``math.inf``.
    """
    f = np.asarray(f, dtype=float)
    f_rec = np.asarray(f_rec, dtype=float)
    if f.shape != f_rec.shape:
        raise ValueError(f"shape mismatch: {f.shape} vs {f_rec.shape}")
    err = float(np.linalg.norm(f - f_rec))
    if err == 0.0:
        return math.inf
    return float(np.linalg.norm(f_rec)) / err


def rsnr_db(f, f_rec) -> float:
    """:func:`rsnr` in decibels (20 log10)."""
    value = rsnr(f, f_rec)
    if value == math.inf:
        return math.inf
    if value == 0.0:
        return -math.inf
    return 20.0 * math.log10(value)
