"""Kernel correlation matrices between circulant filters and dense windows.

Flattening is fixed here and nowhere else:

* column ``c = i' * n + j'`` is the circulant filter ``X^{i',j'}``;
* row ``p = i'' * (N - n + 1) + j''`` is the window with top-left cell ``(i'', j'')``.

Only fully interior windows are samples, so ``P = (M-m+1)(N-n+1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acsii import autocorrelation
from .ccim import circulant_correlation
from .core import as_array3

KERNEL_KINDS = ("gaussian", "linear", "polynomial")


@dataclass(frozen=True)
class KernelConfig:
    kind: str = "gaussian"
    sigma: float = 4.0
    poly_degree: float = 2.0
    poly_offset: float = 1.0
    # divide the squared distance by m*n*D before sigma**2
    normalize_by_dim: bool = True

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.poly_degree >= 1:
            raise ValueError(f"poly_degree must be >= 1, got {self.poly_degree}")


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Kernel values ``K[p, c]`` plus the grid geometry needed to unflatten them."""

    values: np.ndarray
    config: KernelConfig
    filter_shape: tuple[int, int]
    sample_grid: tuple[int, int]

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def base_filter_norm(X0) -> float:
    """``||X0||^2``; every circulant filter shares it since shifts only permute entries."""
    x = as_array3(X0)
    return float(np.sum(x * x))


def kernel_from_correlations(xx: float, zz: np.ndarray, xz: np.ndarray,
                             cfg: KernelConfig, dim: int) -> np.ndarray:
    """Combine filter norm, window norms ``zz`` (P1, P2) and correlations ``xz`` (m, n, P1, P2).

    Returns the ``P x mn`` matrix in the documented flattening.
    """
    m, n, P1, P2 = xz.shape
    corr = xz.reshape(m * n, P1 * P2).T
    if cfg.kind == "linear":
        return np.ascontiguousarray(corr)
    if cfg.kind == "polynomial":
        return (corr + cfg.poly_offset) ** cfg.poly_degree
    dist = xx + zz.reshape(P1 * P2, 1) - 2.0 * corr
    np.maximum(dist, 0.0, out=dist)
    scale = dim if cfg.normalize_by_dim else 1
    return np.exp(-dist / (cfg.sigma ** 2 * scale))


def kernel_matrix(X0, Z, cfg: KernelConfig | None = None) -> KernelMatrix:
    """Kernel matrix from ACSII window norms and CCIM correlations."""
    cfg = cfg or KernelConfig()
    x = as_array3(X0)
    z = as_array3(Z)
    m, n, D = x.shape
    M, N, Dz = z.shape
    if D != Dz:
        raise ValueError(f"channel mismatch: filter has {D}, signal has {Dz}")
    if not (m <= M and n <= N):
        raise ValueError(f"filter {m}x{n} larger than signal {M}x{N}")
    xz = circulant_correlation(x, z).maps
    zz = autocorrelation(z, m, n) if cfg.kind == "gaussian" else None
    values = kernel_from_correlations(base_filter_norm(x), zz, xz, cfg, m * n * D)
    return KernelMatrix(values, cfg, (m, n), (M - m + 1, N - n + 1))


def gram_kernel_matrix(X0, cfg: KernelConfig | None = None) -> KernelMatrix:
    """``mn x mn`` kernel matrix of the circulant filters against each other.

    Uses the filters' wrap-around correlation: correlating ``X^{a}`` with
    ``X^{b}`` is correlating ``X0`` with ``X0`` shifted by ``b - a``, i.e. the
    single window of the periodic extension of ``X0``.
    """
    cfg = cfg or KernelConfig()
    x = as_array3(X0)
    m, n, D = x.shape
    # signal = X0 tiled once more in each direction; every (2m-1)x(2n-1) crop
    # contains each cyclic shift of X0 as an interior window
    tiled = np.concatenate([x, x[:m - 1]], axis=0)
    tiled = np.concatenate([tiled, tiled[:, :n - 1]], axis=1)
    corr = circulant_correlation(x, tiled).maps  # (m, n, m, n): <X^{a}, window at s>
    xx = base_filter_norm(x)
    k = m * n
    # window at offset s = (si, sj) equals X0 shifted by (-si, -sj), i.e. X^{-s}
    ai, aj = np.divmod(np.arange(k), n)
    G = np.empty((k, k))
    for b in range(k):
        bi, bj = divmod(b, n)
        si, sj = (-bi) % m, (-bj) % n
        G[:, b] = corr[ai, aj, si, sj]
    G = 0.5 * (G + G.T)
    if cfg.kind == "linear":
        values = G
    elif cfg.kind == "polynomial":
        values = (G + cfg.poly_offset) ** cfg.poly_degree
    else:
        dist = np.maximum(2.0 * xx - 2.0 * G, 0.0)
        scale = m * n * D if cfg.normalize_by_dim else 1
        values = np.exp(-dist / (cfg.sigma ** 2 * scale))
        np.fill_diagonal(values, 1.0)
    return KernelMatrix(values, cfg, (m, n), (m, n))
