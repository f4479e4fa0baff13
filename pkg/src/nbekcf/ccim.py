"""Circulant correlation with an integral matrix (CCIM).

Correlates every circulant filter ``X^{i',j'}`` (the base filter ``X0``
cyclically shifted by ``(i', j')``) against every fully interior window of a
signal ``Z`` in ``O(mnMND)`` instead of ``O(m^2 n^2 M N D)``.

Steps:

* fundamental matrices ``B[i, j] = shift(sum_d X0[i,j,d] * Z[:,:,d], (-i, -j))``,
  so ``B[i, j][r, c] = X0[i, j] . Z[(r+i) % M, (c+j) % N]``;
* integral matrix ``Mi[s, t] = sum_{i<=s, j<=t} B[i, j]`` (entrywise);
* for each ``(i', j')`` the shifted filter splits into four blocks around the
  position of ``X0[0, 0]``; each block's contribution is a rectangle sum of
  fundamental matrices, read off ``Mi`` in constant time, then realigned by a
  fixed cyclic shift. The four realigned sums' top-left ``(M-m+1, N-n+1)``
  block is the correlation map.

Memory is dominated by the integral matrix: ``m*n*M*N`` float64 values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_array3
from .cyclic import extended_block


@dataclass(frozen=True, eq=False)
class FundamentalMatrixSet:
    """``matrices[i, j]`` is the ``M x N`` fundamental matrix ``B^{i,j}``."""

    matrices: np.ndarray

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]


@dataclass(frozen=True, eq=False)
class IntegralMatrix:
    """``matrices[s, t]`` is the entrywise prefix sum of ``B^{i,j}`` over ``i<=s, j<=t``.

    ``padded`` is the same data with each ``M x N`` matrix periodically
    extended by ``m`` rows on top and ``n`` columns on the left
    (``matrices`` is a view into it), so realignment shifts become slices.
    """

    padded: np.ndarray

    @property
    def m(self) -> int:
        return self.padded.shape[0]

    @property
    def n(self) -> int:
        return self.padded.shape[1]

    @property
    def matrices(self) -> np.ndarray:
        return self.padded[:, :, self.m:, self.n:]


@dataclass(frozen=True, eq=False)
class CorrelationStack:
    """``maps[i', j']`` is the ``(M-m+1) x (N-n+1)`` correlation of ``X^{i',j'}`` with ``Z``."""

    maps: np.ndarray

    @property
    def m(self) -> int:
        return self.maps.shape[0]

    @property
    def n(self) -> int:
        return self.maps.shape[1]

    def __getitem__(self, idx):
        return self.maps[idx]


def _check_shapes(x: np.ndarray, z: np.ndarray):
    m, n, D = x.shape
    M, N, Dz = z.shape
    if D != Dz:
        raise ValueError(f"channel mismatch: filter has {D}, signal has {Dz}")
    if not (m <= M and n <= N):
        raise ValueError(f"filter {m}x{n} larger than signal {M}x{N}")


def fundamental_matrices(X0, Z) -> FundamentalMatrixSet:
    """All ``m*n`` fundamental matrices, as a read-only strided view.

    ``B[i, j][r, c] = sum_d X0[i, j, d] * Z[(r + i) % M, (c + j) % N, d]``.
    """
    x = as_array3(X0)
    z = as_array3(Z)
    _check_shapes(x, z)
    m, n, D = x.shape
    M, N, _ = z.shape
    # weighted signals over the periodic extension of Z (first m-1 rows and
    # n-1 columns appended), all mn of them in one matrix product
    zext = np.concatenate([z, z[:m - 1]], axis=0)
    zext = np.concatenate([zext, zext[:, :n - 1]], axis=1)
    Me, Ne = zext.shape[:2]
    A = (x.reshape(m * n, D) @ zext.reshape(Me * Ne, D).T).reshape(m, n, Me, Ne)
    # B[i, j] is A[i, j] read from offset (i, j): a diagonal strided view
    s0, s1, s2, s3 = A.strides
    B = np.lib.stride_tricks.as_strided(
        A, shape=(m, n, M, N), strides=(s0 + s2, s1 + s3, s2, s3), writeable=False)
    return FundamentalMatrixSet(B)


def integral_matrix(fm: FundamentalMatrixSet) -> IntegralMatrix:
    """Entrywise prefix sums of the fundamental matrices over the filter grid.

    Running sums down the first axis then along the second give the same
    values as ``M[i,j] = M[i-1,j] + M[i,j-1] - M[i-1,j-1] + B[i,j]``.
    """
    m, n, M, N = fm.matrices.shape
    E = np.empty((m, n, M + m, N + n))
    Mi = E[:, :, m:, n:]
    B = fm.matrices
    np.copyto(Mi[0], B[0])
    for i in range(1, m):
        np.add(Mi[i - 1], B[i], out=Mi[i])
    for j in range(1, n):
        Mi[:, j] += Mi[:, j - 1]
    # wrap padding: rows above are the last m rows, columns left the last n
    E[:, :, :m, n:] = E[:, :, M:M + m, n:]
    E[:, :, :, :n] = E[:, :, :, N:N + n]
    return IntegralMatrix(E)


def realignment_shifts(ip: int, jp: int, m: int, n: int):
    """Fixed cyclic shifts ``(di, dj)`` applied to the L, G, K and J block sums."""
    return {
        "L": (m - ip, n - jp),
        "G": (m - ip, -jp),
        "K": (-ip, n - jp),
        "J": (-ip, -jp),
    }


def block_terms(ip: int, jp: int, m: int, n: int):
    """Integral-matrix corners ``(sign, s, t)`` whose signed sum gives each block's ``S``.

    L is the bottom-right ``i' x j'`` corner of ``X0``, G the bottom-left
    ``i' x (n-j')``, K the top-right ``(m-i') x j'`` and J the top-left
    ``(m-i') x (n-j')``. L and G vanish when ``i' = 0``; L and K when ``j' = 0``.
    """
    a, b = m - ip - 1, n - jp - 1
    terms = {"L": [], "G": [], "K": [], "J": [(1, a, b)]}
    if ip > 0 and jp > 0:
        terms["L"] = [(1, m - 1, n - 1), (-1, m - 1, b), (-1, a, n - 1), (1, a, b)]
    if ip > 0:
        terms["G"] = [(1, m - 1, b), (-1, a, b)]
    if jp > 0:
        terms["K"] = [(1, a, n - 1), (-1, a, b)]
    return terms


def block_sums(Mi: np.ndarray, ip: int, jp: int):
    """Full ``M x N`` block sums ``S^L, S^G, S^K, S^J``; absent blocks are ``None``."""
    m, n = Mi.shape[:2]
    out = {}
    for part, terms in block_terms(ip, jp, m, n).items():
        out[part] = sum(sign * Mi[s, t] for sign, s, t in terms) if terms else None
    return out


def correlate_from_integral(im: IntegralMatrix, out_rows: int, out_cols: int,
                            shifts=realignment_shifts) -> np.ndarray:
    """Evaluate every ``C^{i',j'}`` from an integral matrix.

    Realignment is linear, so each integral-matrix corner is shifted and
    cropped on its own, as a slice of the padded integral matrix, and
    accumulated straight into the output block.
    """
    m, n = im.m, im.n
    E = im.padded
    C = np.zeros((m, n, out_rows, out_cols))
    for ip in range(m):
        for jp in range(n):
            sh = shifts(ip, jp, m, n)
            acc = C[ip, jp]
            for part, terms in block_terms(ip, jp, m, n).items():
                if not terms:
                    continue
                di, dj = sh[part]
                for sign, s, t in terms:
                    blk = extended_block(E[s, t], m, n, di, dj, out_rows, out_cols)
                    if sign > 0:
                        acc += blk
                    else:
                        acc -= blk
    return C


def circulant_correlation(X0, Z) -> CorrelationStack:
    """All ``m*n`` circulant-filter correlation maps against ``Z``."""
    x = as_array3(X0)
    z = as_array3(Z)
    _check_shapes(x, z)
    m, n, _ = x.shape
    M, N, _ = z.shape
    im = integral_matrix(fundamental_matrices(x, z))
    return CorrelationStack(correlate_from_integral(im, M - m + 1, N - n + 1))
