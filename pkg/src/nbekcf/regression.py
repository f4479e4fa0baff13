"""Ridge regression over kernel correlation matrices, single- and multi-frame.

Single frame::

    alpha = (K^T K + lam I)^-1 K^T y

Over frames ``q = 1..Q`` with exponential forgetting weights
``beta_1 = (1-gamma)^(Q-1)``, ``beta_q = gamma (1-gamma)^(Q-q)``::

    KS_Q = sum_q beta_q (K_q^T K_q + lam I)     v_Q = sum_q beta_q K_q^T y
    alpha_Q = KS_Q^-1 v_Q

which is maintained recursively as ``KS_Q = (1-gamma) KS_{Q-1} + gamma (K_Q^T K_Q + lam I)``
(and likewise for ``v``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

log = logging.getLogger(__name__)


class IndefiniteSystemError(LinAlgError):
    """The regularized system could not be Cholesky-factorized even with jitter."""


@dataclass(frozen=True, eq=False)
class ModelState:
    KS: np.ndarray
    v: np.ndarray
    alpha: np.ndarray
    lam: float
    gamma: float
    frame_count: int = 1


def _as_matrix(K) -> np.ndarray:
    vals = getattr(K, "values", K)
    arr = np.asarray(vals, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"kernel matrix must be 2-D, got shape {arr.shape}")
    return arr


def _as_labels(y, rows: int) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64).ravel()
    if arr.size != rows:
        raise ValueError(f"label map has {arr.size} entries but kernel matrix has {rows} rows")
    return arr


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")


def _check_gamma(gamma):
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")


def solve_spd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive-definite ``A`` via Cholesky.

    On factorization failure a diagonal jitter of ``1e-10 * trace(A) / n`` is
    added once before giving up.
    """
    try:
        return cho_solve(cho_factor(A, lower=True, check_finite=False), b, check_finite=False)
    except LinAlgError:
        jitter = 1e-10 * np.trace(A) / A.shape[0]
        log.warning("Cholesky failed; retrying with jitter %.3g", jitter)
        try:
            c = cho_factor(A + jitter * np.eye(A.shape[0]), lower=True, check_finite=False)
        except LinAlgError as exc:
            raise IndefiniteSystemError("system matrix is not positive definite") from exc
        return cho_solve(c, b, check_finite=False)


def normal_matrix(K, lam: float) -> np.ndarray:
    """``K^T K + lam I``, symmetrized against roundoff."""
    K = _as_matrix(K)
    G = K.T @ K
    G = 0.5 * (G + G.T)
    G[np.diag_indices_from(G)] += lam
    return G


def solve_ridge(K, y, lam: float) -> np.ndarray:
    """Closed-form ridge coefficients for one kernel matrix."""
    _check_lambda(lam)
    K = _as_matrix(K)
    y = _as_labels(y, K.shape[0])
    return solve_spd(normal_matrix(K, lam), K.T @ y)


def init_model(K1, y, lam: float, gamma: float) -> ModelState:
    _check_lambda(lam)
    _check_gamma(gamma)
    K1 = _as_matrix(K1)
    y = _as_labels(y, K1.shape[0])
    KS = normal_matrix(K1, lam)
    v = K1.T @ y
    return ModelState(KS, v, solve_spd(KS, v), float(lam), float(gamma), 1)


def update_model(state: ModelState, K_new, y) -> ModelState:
    """Blend in a new frame and re-solve; returns a new state with ``frame_count + 1``."""
    K_new = _as_matrix(K_new)
    if K_new.shape[1] != state.KS.shape[0]:
        raise ValueError(f"kernel matrix has {K_new.shape[1]} columns, model expects {state.KS.shape[0]}")
    y = _as_labels(y, K_new.shape[0])
    g = state.gamma
    KS = (1.0 - g) * state.KS + g * normal_matrix(K_new, state.lam)
    KS = 0.5 * (KS + KS.T)
    v = (1.0 - g) * state.v + g * (K_new.T @ y)
    return replace(state, KS=KS, v=v, alpha=solve_spd(KS, v), frame_count=state.frame_count + 1)


def frame_weights(Q: int, gamma: float) -> np.ndarray:
    """Forgetting weights ``beta_1..beta_Q``; they sum to one."""
    if Q < 1:
        raise ValueError("need at least one frame")
    q = np.arange(1, Q + 1)
    beta = gamma * (1.0 - gamma) ** (Q - q)
    beta[0] = (1.0 - gamma) ** (Q - 1)
    return beta


def direct_multiframe_solution(Ks, y, lam: float, gamma: float) -> np.ndarray:
    """Multi-frame coefficients from the explicit weighted sums (reference path)."""
    _check_lambda(lam)
    _check_gamma(gamma)
    Ks = [_as_matrix(K) for K in Ks]
    if not Ks:
        raise ValueError("need at least one kernel matrix")
    beta = frame_weights(len(Ks), gamma)
    total = beta.sum()
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"frame weights sum to {total!r}, not 1")
    k = Ks[0].shape[1]
    lhs = np.zeros((k, k))
    rhs = np.zeros(k)
    for b, K in zip(beta, Ks):
        yk = _as_labels(y, K.shape[0])
        lhs += b * (K.T @ K + lam * np.eye(k))
        rhs += b * (K.T @ yk)
    return np.linalg.solve(lhs, rhs)
