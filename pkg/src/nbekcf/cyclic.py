"""Cyclic shifts by index arithmetic instead of permutation-matrix products.

``P`` below is the down-shift permutation (row 0 moves to row 1) and ``Q`` the
right-shift permutation (column 0 moves to column 1), so

    P^di @ m @ Q^dj  ==  cyclic_shift(m, ShiftSpec(di, dj))
    result[i, j]     ==  m[(i - di) % rows, (j - dj) % cols]

Negative amounts invert the shift. No permutation matrix is ever built.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import FeatureMap, as_array3


class ShiftSpec(NamedTuple):
    di: int = 0
    dj: int = 0

    def __neg__(self):
        return ShiftSpec(-self.di, -self.dj)

    def __add__(self, other):
        return ShiftSpec(self.di + other[0], self.dj + other[1])


def shift_indices(length: int, amount: int, count: int | None = None) -> np.ndarray:
    """Source indices ``(k - amount) mod length`` for output positions ``k < count``."""
    if count is None:
        count = length
    return (np.arange(count) - amount) % length


def cyclic_shift(m, spec) -> np.ndarray:
    """Cyclically shift a 2-D matrix; ``spec`` is a ShiftSpec or ``(di, dj)``."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"cyclic_shift expects a matrix, got shape {arr.shape}")
    di, dj = spec
    rows, cols = arr.shape
    return arr[shift_indices(rows, di)[:, None], shift_indices(cols, dj)[None, :]]


def shifted_block(m: np.ndarray, di: int, dj: int, rows: int, cols: int) -> np.ndarray:
    """Top-left ``rows x cols`` block of ``cyclic_shift(m, (di, dj))``.

    Retrieval from the periodic extension of ``m``; only the requested block is
    gathered. Works on the trailing two axes, so stacks of matrices are fine.
    """
    r = shift_indices(m.shape[-2], di, rows)
    c = shift_indices(m.shape[-1], dj, cols)
    return m[..., r[:, None], c[None, :]]


def periodic_extension(m: np.ndarray, pad_rows: int, pad_cols: int) -> np.ndarray:
    """Prepend the last ``pad_rows`` rows and ``pad_cols`` columns (trailing two axes).

    With ``ext = periodic_extension(S, pr, pc)``, ``ext[k, l] == S[(k - pr) % R, (l - pc) % C]``
    for ``pr <= R`` and ``pc <= C``.
    """
    R, C = m.shape[-2:]
    if pad_rows > R or pad_cols > C:
        raise ValueError("padding larger than one period")
    if pad_rows:
        m = np.concatenate([m[..., R - pad_rows:, :], m], axis=-2)
    if pad_cols:
        m = np.concatenate([m[..., :, C - pad_cols:], m], axis=-1)
    return m


def extended_block(ext: np.ndarray, pad_rows: int, pad_cols: int,
                   di: int, dj: int, rows: int, cols: int) -> np.ndarray:
    """``shifted_block`` read as a plain slice of a periodic extension.

    ``ext`` must come from ``periodic_extension(S, pad_rows, pad_cols)``. When
    the requested shift is not covered by the padding, falls back to gathering
    from the unpadded matrix.
    """
    r0 = pad_rows - di
    c0 = pad_cols - dj
    if 0 <= r0 and r0 + rows <= ext.shape[-2] and 0 <= c0 and c0 + cols <= ext.shape[-1]:
        return ext[..., r0:r0 + rows, c0:c0 + cols]
    return shifted_block(ext[..., pad_rows:, pad_cols:], di, dj, rows, cols)


def cyclic_shift_map(fm, spec) -> FeatureMap:
    """Apply the same spatial shift to every channel of a feature map."""
    arr = as_array3(fm)
    di, dj = spec
    rows, cols, _ = arr.shape
    out = arr[shift_indices(rows, di)[:, None], shift_indices(cols, dj)[None, :], :]
    return FeatureMap(out)


def permutation_matrix_p(size: int) -> np.ndarray:
    """Explicit down-shift permutation ``P`` (row 0 of ``P @ X`` is the last row of ``X``).

    Only for cross-checking the index arithmetic in tests.
    """
    p = np.zeros((size, size))
    p[0, size - 1] = 1.0
    p[1:, :-1] = np.eye(size - 1)
    return p


def permutation_matrix_q(size: int) -> np.ndarray:
    """Explicit right-shift permutation ``Q`` (column 0 of ``X @ Q`` is the last column of ``X``)."""
    q = np.zeros((size, size))
    q[:-1, 1:] = np.eye(size - 1)
    q[size - 1, 0] = 1.0
    return q
