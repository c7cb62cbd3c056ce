"""Core types, random streams, dictionary/signal generators, and matrix text I/O.

Shape conventions used across the package:

- a sensing matrix ``phi`` has shape ``(m, n)`` with ``m <= n``,
- a dictionary ``psi`` has shape ``(n, nhat)`` with ``n <= nhat``,
- the equivalent matrix ``a = phi @ psi`` has shape ``(m, nhat)``,
- vectors are one-dimensional float64 arrays.

Generated dictionaries carry Frobenius energy ``nhat`` (``‖psi‖_F² = nhat``);
sensing matrices produced by :mod:`framesense.design` carry Frobenius energy
``n``.  Every random operation takes a :class:`RandomStream` and is pure: the
same stream always reproduces the same output, so values are safe to share
across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DataFormatError",
    "RandomStream",
    "SignalModel",
    "SparseSignal",
    "derive_stream_id",
    "check_matrix",
    "check_dictionary",
    "check_sensing",
    "haar_orthonormal",
    "gen_gaussian_dictionary",
    "gen_specified_dictionary",
    "canonical_dictionary",
    "gen_sparse_signal",
    "measure",
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
]

_MASK64 = (1 << 64) - 1

SPIKE_KINDS = ("rademacher", "gaussian")


class DataFormatError(ValueError):
    """Raised when an on-disk artifact does not match its declared format."""


def derive_stream_id(*coords) -> int:
    """Map a tuple of coordinate labels to a 64-bit stream id.

    The id is the leading 8 bytes of SHA-256 over the ``|``-joined string form
    of the coordinates, so distinct coordinate tuples give independent stream
    ids regardless of evaluation order.
    """
    text = "|".join(str(c) for c in coords)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RandomStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Each :meth:`generator` call starts a fresh Philox generator at counter
    zero: identical keys replay identical draw sequences, distinct stream ids
    are statistically independent, and no hidden state is shared between
    callers.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, *coords) -> "RandomStream":
        """Derive an independent stream labeled by ``coords``."""
        return RandomStream(self.seed, derive_stream_id(self.stream_id, *coords))


@dataclass(frozen=True)
class SignalModel:
    """Sparse-source description: dimension, exact sparsity, spike law.

    ``spike_kind`` is ``"rademacher"`` (independent ±1 spikes) or
    ``"gaussian"`` (unit-variance normal spikes); both have unit second
    moment. The support is drawn uniformly over all size-``s`` subsets.
    """

    nhat: int
    s: int
    spike_kind: str = "rademacher"

    def __post_init__(self):
        if self.nhat < 1:
            raise ValueError(f"nhat must be >= 1, got {self.nhat}")
        if not 1 <= self.s <= self.nhat:
            raise ValueError(f"s must be in [1, nhat={self.nhat}], got {self.s}")
        if self.spike_kind not in SPIKE_KINDS:
            raise ValueError(f"unknown spike_kind {self.spike_kind!r}")


@dataclass(frozen=True)
class SparseSignal:
    """Exactly sparse vector stored as (support, values).

    ``support`` is strictly increasing, ``values[k]`` sits at index
    ``support[k]``, and every off-support entry is exactly zero.
    """

    nhat: int
    support: tuple[int, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if support.ndim != 1 or values.shape != support.shape:
            raise ValueError("support and values must be 1-D and equally long")
        if support.size and (support[0] < 0 or support[-1] >= self.nhat):
            raise ValueError("support indices out of range")
        if support.size > 1 and np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing")
        object.__setattr__(self, "support", tuple(int(i) for i in support))
        object.__setattr__(self, "values", values)

    def dense(self) -> np.ndarray:
        x = np.zeros(self.nhat)
        x[list(self.support)] = self.values
        return x


def check_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate a 2-D finite float array and return it as float64."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D with positive dimensions")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_dictionary(psi) -> np.ndarray:
    """Validate dictionary shape (n, nhat) with n <= nhat."""
    arr = check_matrix(psi, "dictionary")
    n, nhat = arr.shape
    if nhat < n:
        raise ValueError(f"dictionary must have nhat >= n, got shape {arr.shape}")
    return arr


def check_sensing(phi) -> np.ndarray:
    """Validate sensing-matrix shape (m, n) with m <= n."""
    arr = check_matrix(phi, "sensing matrix")
    m, n = arr.shape
    if n < m:
        raise ValueError(f"sensing matrix must have m <= n, got shape {arr.shape}")
    return arr


def haar_orthonormal(dim: int, gen: np.random.Generator) -> np.ndarray:
    """Draw a Haar-distributed orthonormal ``dim x dim`` matrix.

    QR of a Gaussian matrix with the R-diagonal sign fixed positive, which
    makes the factorization unique and the Q factor Haar.
    """
    g = gen.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * np.where(np.diag(r) < 0.0, -1.0, 1.0)


def gen_gaussian_dictionary(n: int, nhat: int, rng: RandomStream) -> np.ndarray:
    """i.i.d. Gaussian dictionary rescaled to Frobenius energy ``nhat``.

    Parameters
    ----------
    n, nhat : int
        Ambient and representation dimensions, ``1 <= n <= nhat``.
    rng : RandomStream
        Source stream; the same stream reproduces the same dictionary.

    Returns
    -------
    (n, nhat) ndarray with ``‖psi‖_F² = nhat`` and full row rank almost surely.
    """
    if n < 1 or nhat < n:
        raise ValueError(f"need 1 <= n <= nhat, got n={n}, nhat={nhat}")
    g = rng.generator().standard_normal((n, nhat))
    return g * (np.sqrt(nhat) / np.linalg.norm(g))


def gen_specified_dictionary(
    n: int, nhat: int, ratio: float, rng: RandomStream
) -> np.ndarray:
    """Dictionary with a geometric singular-value profile.

    Built as U diag(ratio⁰, …, ratioⁿ⁻¹) Vᵀ with independent Haar factors,
    then rescaled to ``‖psi‖_F² = nhat``; consecutive singular-value ratios
    survive the rescaling.

    Parameters
    ----------
    ratio : float
        Decay factor, ``0 < ratio <= 1``; ``ratio = 1`` gives an equal
        spectrum (a scaled row-orthonormal matrix).
    """
    if not (0.0 < ratio <= 1.0):
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    if n < 1 or nhat < n:
        raise ValueError(f"need 1 <= n <= nhat, got n={n}, nhat={nhat}")
    gen = rng.generator()
    left = haar_orthonormal(n, gen)
    right = haar_orthonormal(nhat, gen)[:, :n]
    spectrum = ratio ** np.arange(n)
    psi = (left * spectrum) @ right.T
    return psi * (np.sqrt(nhat) / np.linalg.norm(psi))


def canonical_dictionary(n: int) -> np.ndarray:
    """Identity dictionary (nhat = n, Frobenius energy exactly n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.eye(n)


def gen_sparse_signal(model: SignalModel, rng: RandomStream) -> SparseSignal:
    """Draw an exactly s-sparse signal from the model.

    The support is uniform over all size-s subsets of [0, nhat); spike values
    follow ``model.spike_kind``.
    """
    gen = rng.generator()
    support = np.sort(gen.choice(model.nhat, size=model.s, replace=False))
    if model.spike_kind == "rademacher":
        values = gen.integers(0, 2, size=model.s) * 2.0 - 1.0
    else:
        values = gen.standard_normal(model.s)
    return SparseSignal(model.nhat, support, values)


def measure(
    phi: np.ndarray,
    psi: np.ndarray,
    x: SparseSignal,
    sigma2: float,
    rng: RandomStream | None = None,
) -> np.ndarray:
    """Noisy measurement y = phi @ psi @ x + noise, noise ~ N(0, sigma2 I).

    With ``sigma2 = 0`` the result is exactly the two matrix-vector products
    and no stream is consumed.
    """
    phi = check_sensing(phi)
    psi = check_dictionary(psi)
    if phi.shape[1] != psi.shape[0] or psi.shape[1] != x.nhat:
        raise ValueError(
            f"dimension mismatch: phi {phi.shape}, psi {psi.shape}, x nhat={x.nhat}"
        )
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    y = phi @ (psi @ x.dense())
    if sigma2 > 0:
        if rng is None:
            raise ValueError("a RandomStream is required when sigma2 > 0")
        y = y + np.sqrt(sigma2) * rng.generator().standard_normal(phi.shape[0])
    return y


def save_matrix(a, path) -> None:
    """Write a matrix in the text format: header "<rows> <cols>", then
    row-major entries at 17 significant digits (exact float64 round trip)."""
    arr = check_matrix(a)
    rows, cols = arr.shape
    lines = [f"{rows} {cols}"]
    for row in arr:
        lines.append(" ".join(format(v, ".17g") for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`.

    Raises
    ------
    DataFormatError
        On a malformed header, a bad entry, or an entry-count mismatch.
    OSError
        If the file cannot be read.
    """
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataFormatError(f"{path}: empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise DataFormatError(f"{path}: malformed header {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError:
        raise DataFormatError(f"{path}: malformed header {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise DataFormatError(f"{path}: non-positive dimensions in header")
    body = " ".join(lines[1:]).split()
    if len(body) != rows * cols:
        raise DataFormatError(
            f"{path}: expected {rows * cols} entries, found {len(body)}"
        )
    try:
        values = np.array([float(tok) for tok in body])
    except ValueError:
        raise DataFormatError(f"{path}: non-numeric entry") from None
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{path}: non-finite entry")
    return values.reshape(rows, cols)


def save_vector(v, path) -> None:
    """Write a vector as a single-column matrix."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("vector must be 1-D and non-empty")
    save_matrix(arr.reshape(-1, 1), path)


def load_vector(path) -> np.ndarray:
    """Read a single-column matrix back as a 1-D vector."""
    arr = load_matrix(path)
    if arr.shape[1] != 1:
        raise DataFormatError(f"{path}: expected a single-column vector")
    return arr[:, 0]
