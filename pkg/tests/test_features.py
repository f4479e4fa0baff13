import math

import numpy as np
import pytest

from nbekcf.core import GrayImage, ShapeError
from nbekcf.features import extract_features


def pixel_oracle(img, cell, bins, eps=1e-6):
    """Per-pixel accumulation with clamped neighbour lookups."""
    H, W = img.shape
    at = lambda r, c: img[min(max(r, 0), H - 1), min(max(c, 0), W - 1)]
    rows, cols = H // cell, W // cell
    hist = np.zeros((rows, cols, bins))
    for r in range(H):
        for c in range(W):
            gx = (at(r, c + 1) - at(r, c - 1)) / 2
            gy = (at(r + 1, c) - at(r - 1, c)) / 2
            mag = math.sqrt(gx * gx + gy * gy)
            if mag == 0:
                continue
            theta = math.atan2(gy, gx)
            if theta < 0:
                theta += math.pi
            if theta >= math.pi:
                theta -= math.pi
            b = min(int(theta / (math.pi / bins)), bins - 1)
            hist[r // cell, c // cell, b] += mag
    out = np.zeros((rows, cols, bins + 1))
    for i in range(rows):
        for j in range(cols):
            h = hist[i, j]
            out[i, j, :bins] = h / (math.sqrt(float(h @ h)) + eps)
            out[i, j, bins] = img[i * cell:(i + 1) * cell, j * cell:(j + 1) * cell].mean()
    return out


def test_constant_patch():
    fm = extract_features(np.full((8, 12), 0.4), 4, 8)
    assert fm.shape == (2, 3, 9)
    assert np.array_equal(fm.data[:, :, :8], np.zeros((2, 3, 8)))
    assert np.allclose(fm.data[:, :, 8], 0.4, rtol=1e-15)


def test_vertical_step_edge():
    img = np.zeros((8, 8))
    img[:, 4:] = 1.0
    fm = extract_features(img, 4, 8)
    hist = fm.data[:, :, :8].sum(axis=(0, 1))
    assert np.argmax(hist) == 0
    assert hist[0] > 0 and np.all(hist[1:] == 0)


def test_random_patch_matches_oracle():
    img = np.random.default_rng(0).random((8, 8))
    fm = extract_features(GrayImage(img), 4, 8)
    assert np.allclose(fm.data, pixel_oracle(img, 4, 8), rtol=1e-12, atol=1e-15)


def test_larger_random_patch_matches_oracle():
    img = np.random.default_rng(1).random((12, 20))
    assert np.allclose(extract_features(img, 4, 6).data, pixel_oracle(img, 4, 6), rtol=1e-12, atol=1e-15)


def test_replication_padding():
    img = np.random.default_rng(2).random((10, 7))
    padded = np.pad(img, ((0, 2), (0, 1)), mode="edge")
    assert extract_features(img, 4, 8) == extract_features(padded, 4, 8)


def test_histogram_normalized():
    img = np.random.default_rng(3).random((16, 16))
    h = extract_features(img, 4, 8).data[:, :, :8]
    norms = np.sqrt(np.sum(h * h, axis=2))
    assert np.all(norms <= 1.0) and np.all(norms > 0.99)


def test_degenerate():
    with pytest.raises(ShapeError):
        extract_features(np.zeros((0, 4)), 4, 8)
    with pytest.raises(ValueError):
        extract_features(np.zeros((4, 4)), 0, 8)
