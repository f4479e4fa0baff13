"""Synthetic tracking sequences for tests."""
import numpy as np
from scipy.ndimage import gaussian_filter

from nbekcf.core import BoundingBox


def _normalized(a):
    return (a - a.min()) / (a.max() - a.min())


def moving_square(frames=100, height=160, width=300, size=40, x0=30, y0=60,
                  vx=2, vy=0, seed=0):
    """Textured ``size x size`` square moving ``(vx, vy)`` px/frame over smoothed noise clutter.

    Returns ``(frames, ground_truth_boxes)``; frames are float arrays in [0, 1].
    """
    rng = np.random.default_rng(seed)
    bg = _normalized(gaussian_filter(rng.random((height, width)), 1.5))
    tex = 0.2 + 0.8 * _normalized(gaussian_filter(rng.random((size, size)), 1.0))
    out, gts = [], []
    for k in range(frames):
        x, y = x0 + vx * k, y0 + vy * k
        f = bg.copy()
        f[y:y + size, x:x + size] = tex
        out.append(f)
        gts.append(BoundingBox(x, y, size, size))
    return out, gts
