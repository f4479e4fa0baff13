"""Shared value types: feature maps, matrices, boxes and grayscale images.

Feature maps are stored as C-contiguous ``(rows, cols, channels)`` float64
arrays, so element ``(i, j, d)`` lives at flat offset ``(i * cols + j) * D + d``
(channel innermost). ``i`` is the row (vertical) index and ``j`` the column.
All containers are read-only after construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ShapeError(ValueError):
    """Raised when array dimensions do not agree."""


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """A ``rows x cols x channels`` real tensor (channel-innermost, row-major)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="C", copy=True)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ShapeError(f"feature map must be a non-empty 3-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("feature map contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def channel(self, d: int) -> np.ndarray:
        return self.data[:, :, d]

    def __eq__(self, other):
        if not isinstance(other, FeatureMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"FeatureMap(rows={self.rows}, cols={self.cols}, channels={self.channels})"


def make_feature_map(rows: int, cols: int, channels: int, data) -> FeatureMap:
    """Build a FeatureMap from a flat sequence laid out as ``(i*cols + j)*D + d``."""
    for name, v in (("rows", rows), ("cols", cols), ("channels", channels)):
        if int(v) != v or v < 1:
            raise ShapeError(f"{name} must be a positive integer, got {v!r}")
    flat = np.asarray(data, dtype=np.float64).ravel()
    expected = rows * cols * channels
    if flat.size != expected:
        raise ShapeError(f"expected {expected} values for a {rows}x{cols}x{channels} map, got {flat.size}")
    return FeatureMap(flat.reshape(rows, cols, channels))


def as_array3(fm) -> np.ndarray:
    """Return the ``(rows, cols, D)`` float64 array behind a FeatureMap or array-like."""
    if isinstance(fm, FeatureMap):
        return fm.data
    arr = np.asarray(fm, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ShapeError(f"expected a 2-D or 3-D array, got shape {arr.shape}")
    return arr


def make_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Validated read-only 2-D float64 matrix (the RealMatrix type).

    ``data`` may be nested sequences or a flat sequence plus ``rows``/``cols``.
    """
    arr = np.array(data, dtype=np.float64, order="C", copy=True)
    if rows is not None or cols is not None:
        if rows is None or cols is None:
            raise ShapeError("rows and cols must be given together")
        if arr.size != rows * cols:
            raise ShapeError(f"expected {rows * cols} values, got {arr.size}")
        arr = arr.reshape(rows, cols)
    if arr.ndim != 2 or min(arr.shape) < 1:
        raise ShapeError(f"matrix must be non-empty 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box; ``(x, y)`` is the top-left corner in pixels."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        vals = (self.x, self.y, self.w, self.h)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"box coordinates must be finite: {vals}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box extents must be positive, got w={self.w}, h={self.h}")

    @property
    def center(self) -> tuple[float, float]:
        """``(cx, cy)`` in pixels."""
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    @classmethod
    def from_center(cls, cx: float, cy: float, w: float, h: float) -> "BoundingBox":
        return cls(cx - w / 2.0, cy - h / 2.0, w, h)

    def clamped(self, width: int, height: int) -> "BoundingBox":
        """Shift (and if needed shrink) the box so it lies inside a ``width x height`` frame."""
        w = min(self.w, float(width))
        h = min(self.h, float(height))
        x = min(max(self.x, 0.0), width - w)
        y = min(max(self.y, 0.0), height - h)
        return BoundingBox(x, y, w, h)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale image with intensities in [0, 1], indexed ``pixels[row, col]``."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2 or min(arr.shape) < 1:
            raise ShapeError(f"image must be non-empty 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image intensities must lie in [0, 1]")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return bool(np.array_equal(self.pixels, other.pixels))
