"""Brute-force reference implementations.

These deliberately avoid integral images, integral matrices and realignment
shifts: each quantity is evaluated straight from its definition, one window
and one filter at a time. They exist for tests, ``selftest`` and the
``bench --method brute`` baseline, and refuse inputs larger than 16x16.
"""
from __future__ import annotations

import numpy as np

from .core import as_array3
from .cyclic import cyclic_shift_map
from .kernel import KernelConfig

MAX_ORACLE_SIZE = 16


def _check_small(M, N):
    if M > MAX_ORACLE_SIZE or N > MAX_ORACLE_SIZE:
        raise ValueError(f"oracle restricted to M, N <= {MAX_ORACLE_SIZE}; got {M}x{N}")


def _check_window(M, N, m, n):
    if not (1 <= m <= M and 1 <= n <= N):
        raise ValueError(f"window {m}x{n} does not fit in a {M}x{N} signal")


def brute_autocorrelation(Z, m: int, n: int) -> np.ndarray:
    """Squared norm of every fully interior ``m x n`` window, by direct summation."""
    z = as_array3(Z)
    M, N, _ = z.shape
    _check_small(M, N)
    _check_window(M, N, m, n)
    out = np.zeros((M - m + 1, N - n + 1))
    for i in range(M - m + 1):
        for j in range(N - n + 1):
            window = z[i:i + m, j:j + n, :]
            out[i, j] = np.sum(window * window)
    return out


def circulant_filters(X0) -> np.ndarray:
    """All circulant filters ``X^{i',j'}`` stacked as ``(m, n, m, n, D)``."""
    x = as_array3(X0)
    m, n, _ = x.shape
    return np.stack([
        np.stack([cyclic_shift_map(x, (ip, jp)).data for jp in range(n)])
        for ip in range(m)
    ])


def brute_circulant_correlation(X0, Z) -> np.ndarray:
    """``C[i', j', i'', j''] = <X^{i',j'}, Z^{i'',j''}>`` evaluated window by window."""
    x = as_array3(X0)
    z = as_array3(Z)
    m, n, D = x.shape
    M, N, Dz = z.shape
    _check_small(M, N)
    _check_window(M, N, m, n)
    if D != Dz:
        raise ValueError(f"channel mismatch: filter has {D}, signal has {Dz}")
    filters = circulant_filters(x)
    out = np.zeros((m, n, M - m + 1, N - n + 1))
    for ip in range(m):
        for jp in range(n):
            f = filters[ip, jp]
            for i in range(M - m + 1):
                for j in range(N - n + 1):
                    out[ip, jp, i, j] = np.sum(f * z[i:i + m, j:j + n, :])
    return out


def _kernel_value(a: np.ndarray, b: np.ndarray, cfg: KernelConfig) -> float:
    if cfg.kind == "linear":
        return float(np.sum(a * b))
    if cfg.kind == "polynomial":
        return float((np.sum(a * b) + cfg.poly_offset) ** cfg.poly_degree)
    scale = a.size if cfg.normalize_by_dim else 1
    dist = float(np.sum((a - b) ** 2))
    return float(np.exp(-dist / (cfg.sigma ** 2 * scale)))


def brute_kernel_matrix(X0, Z, cfg: KernelConfig | None = None) -> np.ndarray:
    """``P x mn`` kernel matrix, every entry evaluated from materialized filter and window.

    Rows are windows ``p = i''*(N-n+1) + j''``; columns are filters ``c = i'*n + j'``.
    """
    cfg = cfg or KernelConfig()
    x = as_array3(X0)
    z = as_array3(Z)
    m, n, D = x.shape
    M, N, Dz = z.shape
    _check_small(M, N)
    _check_window(M, N, m, n)
    if D != Dz:
        raise ValueError(f"channel mismatch: filter has {D}, signal has {Dz}")
    filters = circulant_filters(x).reshape(m * n, m, n, D)
    P1, P2 = M - m + 1, N - n + 1
    out = np.zeros((P1 * P2, m * n))
    for i in range(P1):
        for j in range(P2):
            window = z[i:i + m, j:j + n, :]
            for c in range(m * n):
                out[i * P2 + j, c] = _kernel_value(filters[c], window, cfg)
    return out


def brute_gram_matrix(X0, cfg: KernelConfig | None = None) -> np.ndarray:
    """``mn x mn`` kernel matrix among the circulant filters themselves."""
    cfg = cfg or KernelConfig()
    x = as_array3(X0)
    m, n, D = x.shape
    filters = circulant_filters(x).reshape(m * n, m, n, D)
    k = m * n
    out = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            out[a, b] = _kernel_value(filters[a], filters[b], cfg)
    return out
