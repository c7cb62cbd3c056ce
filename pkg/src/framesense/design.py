"""Sensing-matrix constructions under the energy budget ``‖phi‖_F² = n``.

Both optimized designs push the equivalent matrix ``a = phi @ psi`` toward a
tight frame, which is what minimizes the support-averaged oracle MSE under a
trace budget:

- :func:`design_tf1` solves the regularized target-matching problem
  ``min ‖p @ psi - b‖_F² + alpha ‖p‖_F²`` against an explicit Parseval target
  ``b`` in closed form.
- :func:`design_tf2` inverts the dictionary's top ``m`` modes so the
  pre-normalization equivalent matrix has exactly orthonormal rows, with the
  smallest Frobenius energy among all matrices achieving that.

``design_gaussian`` is the random baseline. All constructions return matrices
normalized to ``‖phi‖_F² = n``; the ``*_raw`` variants expose the
pre-normalization solutions whose structural identities the optimized designs
guarantee.
"""

from __future__ import annotations

import numpy as np

from .model import (
    RandomStream,
    check_dictionary,
    check_matrix,
    haar_orthonormal,
)

__all__ = [
    "COND_LIMIT",
    "gen_parseval_target",
    "design_gaussian",
    "design_tf1",
    "design_tf1_raw",
    "design_tf2",
    "design_tf2_raw",
    "normalize_sensing",
    "tightness_objective",
]

# Uniform singularity guard: condition numbers at or beyond this are errors.
COND_LIMIT = 1e12

_RANK_TOL = 1e-12
# Singular values closer than this (relative to the largest) are treated as a
# degenerate group whose singular-vector gauge is not determined by the input.
_DEGENERATE_TOL = 1e-10

LEFT_FACTORS = ("identity", "random-orthonormal")


def gen_parseval_target(m: int, nhat: int, rng: RandomStream) -> np.ndarray:
    """Random ``m x nhat`` Parseval frame: ``b @ b.T = eye(m)``.

    Drawn as the left/right singular factors of a Gaussian matrix with all
    singular values replaced by 1, i.e. a generic frame with no preferred
    orientation. ``trace(b.T @ b) = m`` follows.
    """
    if not 1 <= m <= nhat:
        raise ValueError(f"need 1 <= m <= nhat, got m={m}, nhat={nhat}")
    g = rng.generator().standard_normal((m, nhat))
    u, _, vt = np.linalg.svd(g, full_matrices=False)
    return u @ vt


def design_gaussian(m: int, n: int, rng: RandomStream) -> np.ndarray:
    """i.i.d. Gaussian sensing matrix normalized to ``‖phi‖_F² = n``."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    g = rng.generator().standard_normal((m, n))
    return normalize_sensing(g, n)


def design_tf1_raw(psi, target, alpha: float) -> np.ndarray:
    """Unnormalized target-matching design.

    Closed-form minimizer of ``‖p @ psi - b‖_F² + alpha ‖p‖_F²``:
    ``p = b @ psi.T @ inv(psi @ psi.T + alpha I)``.

    Raises
    ------
    numpy.linalg.LinAlgError
        If ``psi @ psi.T + alpha I`` has condition number >= 1e12 (in
        particular alpha = 0 with a rank-deficient dictionary).
    """
    psi = check_dictionary(psi)
    b = check_matrix(target, "target")
    n, nhat = psi.shape
    m = b.shape[0]
    if b.shape[1] != nhat or m > n:
        raise ValueError(
            f"target shape {b.shape} incompatible with dictionary {psi.shape}"
        )
    if not (np.isfinite(alpha) and alpha >= 0):
        raise ValueError(f"alpha must be finite and >= 0, got {alpha}")
    mat = psi @ psi.T + alpha * np.eye(n)
    if np.linalg.cond(mat) >= COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"psi @ psi.T + alpha*I is numerically singular (alpha={alpha:g})"
        )
    return np.linalg.solve(mat, psi @ b.T).T


def design_tf1(psi, target, alpha: float) -> np.ndarray:
    """Target-matching design normalized to ``‖phi‖_F² = n``."""
    psi = check_dictionary(psi)
    return normalize_sensing(design_tf1_raw(psi, target, alpha), psi.shape[0])


def design_tf2_raw(
    psi, m: int, rng: RandomStream, left_factor: str = "identity"
) -> np.ndarray:
    """Unnormalized mode-inversion design.

    With ``psi = u @ diag(lam) @ vt`` (``lam`` descending), returns
    ``u_phi @ [diag(1/lam[:m]) | 0] @ u.T``, which satisfies
    ``p @ psi @ psi.T @ p.T = eye(m)`` exactly and has the minimal Frobenius
    energy ``sum(1/lam[:m]**2)`` among all matrices satisfying it.

    Singular vectors belonging to (numerically) equal singular values are only
    determined up to a rotation within their group, and numpy resolves that
    ambiguity in a coordinate-dependent way; a Haar rotation per degenerate
    group is drawn from ``rng`` so the construction does not leak the input
    coordinate frame. ``left_factor="random-orthonormal"`` additionally applies
    a random orthonormal ``u_phi`` (the default is the identity).

    Raises
    ------
    numpy.linalg.LinAlgError
        If the m-th singular value of the dictionary is <= 1e-12.
    """
    psi = check_dictionary(psi)
    n = psi.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if left_factor not in LEFT_FACTORS:
        raise ValueError(f"left_factor must be one of {LEFT_FACTORS}")
    gen = rng.generator()
    u, lam, _ = np.linalg.svd(psi, full_matrices=False)
    if lam[m - 1] <= _RANK_TOL:
        raise np.linalg.LinAlgError(
            f"dictionary is rank-deficient: singular value {m} is {lam[m - 1]:.3e}"
        )
    u = _randomize_degenerate_gauge(u, lam, gen)
    phi_hat = (u[:, :m] / lam[:m]).T
    if left_factor == "random-orthonormal":
        phi_hat = haar_orthonormal(m, gen) @ phi_hat
    return phi_hat


def design_tf2(
    psi, m: int, rng: RandomStream, left_factor: str = "identity"
) -> np.ndarray:
    """Mode-inversion design normalized to ``‖phi‖_F² = n``."""
    psi = check_dictionary(psi)
    return normalize_sensing(design_tf2_raw(psi, m, rng, left_factor), psi.shape[0])


def _randomize_degenerate_gauge(
    u: np.ndarray, lam: np.ndarray, gen: np.random.Generator
) -> np.ndarray:
    """Rotate singular-vector columns within each group of equal singular
    values by a Haar block, yielding an equally valid, generic basis."""
    tol = _DEGENERATE_TOL * lam[0]
    out = u
    start = 0
    for i in range(1, lam.size + 1):
        if i == lam.size or lam[i - 1] - lam[i] > tol:
            if i - start >= 2:
                if out is u:
                    out = u.copy()
                block = haar_orthonormal(i - start, gen)
                out[:, start:i] = out[:, start:i] @ block
            start = i
    return out


def normalize_sensing(phi, n: int) -> np.ndarray:
    """Rescale to Frobenius energy ``n``, preserving direction."""
    phi = check_matrix(phi, "sensing matrix")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fro = np.linalg.norm(phi)
    if fro == 0.0:
        raise ValueError("cannot normalize a zero matrix")
    return phi * (np.sqrt(n) / fro)


def tightness_objective(a, m: int, nhat: int) -> float:
    """Distance of the Gram from the flat trace-m spectrum:
    ``‖a.T @ a - (m/nhat) I‖_F²``.

    Over all ``m x nhat`` matrices with ``trace(a.T @ a) = m``, the minimum is
    ``m (nhat - m) / nhat``, achieved exactly by the Parseval tight frames.
    """
    a = check_matrix(a)
    if a.shape != (m, nhat):
        raise ValueError(f"expected shape {(m, nhat)}, got {a.shape}")
    g = a.T @ a - (m / nhat) * np.eye(nhat)
    return float(np.sum(g * g))
