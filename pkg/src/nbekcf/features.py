"""Hand-crafted cell features: gradient-orientation histograms plus mean intensity.

Each ``cell x cell`` block of pixels yields ``bins + 1`` channels: a
magnitude-weighted histogram of unsigned gradient orientations (L2-normalized
per cell) and the block's mean intensity.
"""
from __future__ import annotations

import numpy as np

from .core import FeatureMap, GrayImage, ShapeError

EPS = 1e-6


def _pixels(patch) -> np.ndarray:
    if isinstance(patch, GrayImage):
        return patch.pixels
    arr = np.asarray(patch, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"patch must be 2-D, got shape {arr.shape}")
    return arr


def pad_to_cells(img: np.ndarray, cell_size: int) -> np.ndarray:
    """Replicate the bottom row / right column until both sides are multiples of ``cell_size``."""
    H, W = img.shape
    ph = -H % cell_size
    pw = -W % cell_size
    if ph or pw:
        img = np.pad(img, ((0, ph), (0, pw)), mode="edge")
    return img


def gradients(img: np.ndarray):
    """Central differences with edge replication; returns ``(gx, gy)``."""
    p = np.pad(img, 1, mode="edge")
    gx = 0.5 * (p[1:-1, 2:] - p[1:-1, :-2])
    gy = 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1])
    return gx, gy


def orientation_bins(gx: np.ndarray, gy: np.ndarray, bins: int) -> np.ndarray:
    """Hard-assigned bin of the unsigned orientation in ``[0, pi)``."""
    theta = np.mod(np.arctan2(gy, gx), np.pi)
    b = np.floor(theta * (bins / np.pi)).astype(np.intp)
    return np.clip(b, 0, bins - 1)


def extract_features(patch, cell_size: int = 4, bins: int = 8) -> FeatureMap:
    """``(rows/cell) x (cols/cell) x (bins+1)`` feature map of a grayscale patch."""
    if cell_size < 1 or bins < 1:
        raise ValueError("cell_size and bins must be positive")
    img = _pixels(patch)
    if img.size == 0:
        raise ShapeError("degenerate patch: no pixels")
    img = pad_to_cells(img, cell_size)
    H, W = img.shape
    r, c = H // cell_size, W // cell_size

    gx, gy = gradients(img)
    mag = np.hypot(gx, gy)
    b = orientation_bins(gx, gy, bins)
    rows = np.arange(H)[:, None] // cell_size
    cols = np.arange(W)[None, :] // cell_size
    idx = ((rows * c + cols) * bins + b).ravel()
    hist = np.bincount(idx, weights=mag.ravel(), minlength=r * c * bins).reshape(r, c, bins)
    hist /= np.sqrt(np.sum(hist * hist, axis=2, keepdims=True)) + EPS

    out = np.empty((r, c, bins + 1))
    out[:, :, :bins] = hist
    out[:, :, bins] = img.reshape(r, cell_size, c, cell_size).mean(axis=(1, 3))
    return FeatureMap(out)
