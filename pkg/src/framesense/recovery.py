"""Sparse estimators: oracle least squares, orthogonal matching pursuit, and
basis pursuit denoise via ADMM.

All solvers take the equivalent matrix ``a`` (shape ``(m, nhat)``) and a
measurement vector ``y`` and return a :class:`RecoveryResult` whose estimate
has length ``nhat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import check_matrix

__all__ = ["RecoveryResult", "BpdnParams", "oracle_ls", "omp", "bpdn"]

COND_LIMIT = 1e12

# A solution counts as feasible when its residual exceeds the budget by at
# most this slack.
FEASIBILITY_SLACK = 1e-6


@dataclass(frozen=True)
class RecoveryResult:
    """Estimate plus solver diagnostics.

    For oracle/OMP outputs the estimate is exactly zero off its support.
    """

    estimate: np.ndarray = field(repr=False)
    support: tuple[int, ...]
    iterations: int
    residual_norm: float
    converged: bool


@dataclass(frozen=True)
class BpdnParams:
    """Budget and iteration controls for :func:`bpdn`.

    ``epsilon`` is the residual budget; ``tolerance`` bounds the relative
    primal and dual ADMM residuals at convergence; ``penalty`` is the ADMM
    splitting parameter.
    """

    epsilon: float
    max_iterations: int = 5000
    tolerance: float = 1e-7
    penalty: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if not self.penalty > 0:
            raise ValueError("penalty must be > 0")


def _check_y(a: np.ndarray, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (a.shape[0],):
        raise ValueError(f"y must have shape ({a.shape[0]},), got {y.shape}")
    return y


def oracle_ls(a, y, support) -> RecoveryResult:
    """Least squares restricted to a known support, zero elsewhere.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the restricted Gram has condition number >= 1e12.
    """
    a = check_matrix(a)
    y = _check_y(a, y)
    support = np.asarray(support, dtype=np.int64)
    if support.ndim != 1 or support.size == 0:
        raise ValueError("support must be a non-empty 1-D index set")
    if np.unique(support).size != support.size:
        raise ValueError("support contains repeated indices")
    if support.min() < 0 or support.max() >= a.shape[1]:
        raise ValueError("support indices out of range")
    sub = a[:, support]
    if np.linalg.cond(sub.T @ sub) >= COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"restricted Gram is numerically singular on support "
            f"{tuple(int(i) for i in support)}"
        )
    coef, _, _, _ = np.linalg.lstsq(sub, y, rcond=None)
    estimate = np.zeros(a.shape[1])
    estimate[support] = coef
    residual = float(np.linalg.norm(sub @ coef - y))
    return RecoveryResult(
        estimate=estimate,
        support=tuple(int(i) for i in np.sort(support)),
        iterations=0,
        residual_norm=residual,
        converged=True,
    )


def omp(a, y, max_support: int, residual_tol: float = 0.0) -> RecoveryResult:
    """Orthogonal matching pursuit.

    Atom selection maximizes the column-normalized correlation with the
    residual (ties break to the smallest index, atoms are never re-selected);
    each iteration re-fits least squares on the accumulated support using the
    unnormalized columns. Stops at ``max_support`` atoms or when the residual
    norm drops to ``residual_tol``.
    """
    a = check_matrix(a)
    y = _check_y(a, y)
    m, nhat = a.shape
    if not 0 <= max_support <= m:
        raise ValueError(f"max_support must be in [0, m={m}], got {max_support}")
    if residual_tol < 0:
        raise ValueError(f"residual_tol must be >= 0, got {residual_tol}")
    col_norms = np.linalg.norm(a, axis=0)
    if np.any(col_norms == 0.0):
        raise ValueError("matrix has a zero column")

    estimate = np.zeros(nhat)
    support: list[int] = []
    coef = np.zeros(0)
    residual = y.copy()
    rnorm = float(np.linalg.norm(residual))
    iterations = 0
    while len(support) < max_support and rnorm > residual_tol:
        corr = np.abs(a.T @ residual) / col_norms
        corr[support] = -1.0
        support.append(int(np.argmax(corr)))
        sub = a[:, support]
        coef, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
        if rank < len(support):
            raise np.linalg.LinAlgError(
                f"rank-deficient least-squares step on support {tuple(support)}"
            )
        residual = y - sub @ coef
        rnorm = float(np.linalg.norm(residual))
        iterations += 1
    estimate[support] = coef
    return RecoveryResult(
        estimate=estimate,
        support=tuple(sorted(support)),
        iterations=iterations,
        residual_norm=rnorm,
        converged=True,
    )


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _project_ball(v: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    d = v - center
    norm = float(np.linalg.norm(d))
    if norm <= radius:
        return v
    if radius == 0.0:
        return center.copy()
    return center + d * (radius / norm)


def bpdn(a, y, params: BpdnParams) -> RecoveryResult:
    """Basis pursuit denoise: ``min ‖x‖₁  s.t.  ‖a @ x - y‖₂ <= epsilon``.

    ADMM with two auxiliary blocks, ``z1 = x`` carrying the soft-threshold
    step and ``z2 = a @ x`` projected onto the epsilon-ball around ``y``; the
    x-update solves against a cached Cholesky factor of ``I + a.T @ a``. The
    sparse iterate ``z1`` (exact zeros from the threshold) is the candidate
    solution; the best feasible candidate by l1 norm is tracked and returned,
    so a non-converged run still reports its best iterate with
    ``converged=False``.

    Raises
    ------
    numpy.linalg.LinAlgError
        If ``epsilon = 0`` and ``y`` is not in the range of ``a``.
    """
    a = check_matrix(a)
    y = _check_y(a, y)
    m, nhat = a.shape
    eps = params.epsilon

    x_ls, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    base_residual = float(np.linalg.norm(a @ x_ls - y))
    if eps == 0.0 and base_residual > 1e-8 * max(1.0, float(np.linalg.norm(y))):
        raise np.linalg.LinAlgError(
            f"epsilon=0 is infeasible: min residual over the range of a is "
            f"{base_residual:.6e}"
        )

    rho = params.penalty
    factor = cho_factor(a.T @ a + np.eye(nhat))
    z1 = x_ls.copy()
    z2 = a @ x_ls
    u1 = np.zeros(nhat)
    u2 = np.zeros(m)

    best = None
    best_l1 = math.inf
    best_violation = math.inf
    hit_tolerance = False
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        x = cho_solve(factor, (z1 - u1) + a.T @ (z2 - u2))
        ax = a @ x
        z1_old, z2_old = z1, z2
        z1 = _soft_threshold(x + u1, 1.0 / rho)
        z2 = _project_ball(ax + u2, y, eps)
        u1 += x - z1
        u2 += ax - z2

        az1 = a @ z1
        violation = max(0.0, float(np.linalg.norm(az1 - y)) - eps)
        l1 = float(np.sum(np.abs(z1)))
        feasible = violation <= FEASIBILITY_SLACK
        best_feasible = best_violation <= FEASIBILITY_SLACK
        if (feasible and (not best_feasible or l1 < best_l1)) or (
            not feasible and not best_feasible and violation < best_violation
        ):
            best = z1.copy()
            best_l1 = l1
            best_violation = violation

        primal = math.hypot(
            float(np.linalg.norm(x - z1)), float(np.linalg.norm(ax - z2))
        )
        primal_scale = max(
            1.0,
            math.hypot(float(np.linalg.norm(x)), float(np.linalg.norm(ax))),
            math.hypot(float(np.linalg.norm(z1)), float(np.linalg.norm(z2))),
        )
        dual = rho * float(np.linalg.norm((z1_old - z1) + a.T @ (z2_old - z2)))
        dual_scale = max(1.0, rho * float(np.linalg.norm(u1 + a.T @ u2)))
        if primal <= params.tolerance * primal_scale and (
            dual <= params.tolerance * dual_scale
        ):
            hit_tolerance = True
            break

    estimate = best
    residual = float(np.linalg.norm(a @ estimate - y))
    converged = hit_tolerance and residual <= eps + FEASIBILITY_SLACK
    support = tuple(int(i) for i in np.flatnonzero(estimate))
    return RecoveryResult(
        estimate=estimate,
        support=support,
        iterations=iterations,
        residual_norm=residual,
        converged=converged,
    )
