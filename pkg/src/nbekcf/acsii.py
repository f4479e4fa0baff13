"""Autocorrelation of all dense sub-windows through a squared integral image.

For a signal ``Z`` of shape ``(M, N, D)`` and window ``m x n`` the squared
Frobenius norm of every fully interior window is obtained in ``O(MND)``:

1. ``A[i, j] = sum_d Z[i, j, d]**2``
2. ``I`` = summed-area table of ``A``
3. each window norm is a four-corner difference of ``I``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_array3


@dataclass(frozen=True, eq=False)
class SquaredIntegralImage:
    """``values[i, j]`` is the sum of ``A[p, q]`` over ``p <= i, q <= j``."""

    values: np.ndarray

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def squared_channel_sum(Z) -> np.ndarray:
    """Per-position sum of squares over channels, accumulated in float64."""
    z = as_array3(Z).astype(np.float64, copy=False)
    return np.einsum("ijd,ijd->ij", z, z)


def integral_image(A) -> SquaredIntegralImage:
    """Summed-area table of a matrix.

    First row and first column are running sums; the interior then follows
    ``I[i,j] = I[i-1,j] + I[i,j-1] - I[i-1,j-1] + A[i,j]``, which unrolls to
    a row cumsum followed by a column cumsum.
    """
    a = np.asarray(A, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"integral_image expects a matrix, got shape {a.shape}")
    values = np.cumsum(np.cumsum(a, axis=0), axis=1)
    values.flags.writeable = False
    return SquaredIntegralImage(values)


def window_sums(I: np.ndarray, m: int, n: int) -> np.ndarray:
    """Sums over every ``m x n`` window, read off a summed-area table ``I``.

    The top row, left column and interior are handled separately so no
    zero-padded border is needed.
    """
    M, N = I.shape[-2:]
    P1, P2 = M - m + 1, N - n + 1
    B = np.empty(I.shape[:-2] + (P1, P2))
    B[..., 0, 0] = I[..., m - 1, n - 1]
    if P1 > 1:
        B[..., 1:, 0] = I[..., m:, n - 1] - I[..., :P1 - 1, n - 1]
    if P2 > 1:
        B[..., 0, 1:] = I[..., m - 1, n:] - I[..., m - 1, :P2 - 1]
    if P1 > 1 and P2 > 1:
        B[..., 1:, 1:] = (I[..., m:, n:] - I[..., :P1 - 1, n:]
                          - I[..., m:, :P2 - 1] + I[..., :P1 - 1, :P2 - 1])
    return B


def autocorrelation(Z, m: int, n: int) -> np.ndarray:
    """Squared norm of each ``m x n x D`` window of ``Z``; shape ``(M-m+1, N-n+1)``.

    Entry ``(i, j)`` belongs to the window whose top-left cell is ``(i, j)``.
    """
    z = as_array3(Z)
    M, N, _ = z.shape
    if not (1 <= m <= M and 1 <= n <= N):
        raise ValueError(f"window {m}x{n} does not fit in a {M}x{N} signal")
    sat = integral_image(squared_channel_sum(z))
    B = window_sums(sat.values, m, n)
    # differences of large prefix sums can dip a hair below zero
    np.maximum(B, 0.0, out=B)
    return B
