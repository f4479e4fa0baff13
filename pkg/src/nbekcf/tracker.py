"""Single-object tracker built on circulant-filter kernel regression.

Geometry, per frame:

* the target spans ``m x n`` feature cells and the search region ``M x N``;
* the search region is placed so that the window with top-left cell
  ``(oi, oj) = ((M-m)//2, (N-n)//2)`` is centred on the current target centre;
* the regression label is a Gaussian peaked at ``(oi, oj)`` on the
  ``(M-m+1) x (N-n+1)`` grid of interior windows;
* detection evaluates ``K' alpha`` on a new search region and moves the centre
  by the offset of the response peak from ``(oi, oj)``.

Coordinates are continuous pixels: pixel ``(r, c)`` covers ``[c, c+1) x [r, r+1)``.
Small targets are handled by sampling every patch with a step of
``1 / resize_ratio`` original pixels, which is the same as resizing each frame
once by ``resize_ratio``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.ndimage import map_coordinates

from .core import BoundingBox, FeatureMap, GrayImage, as_array3
from .features import extract_features
from .kernel import KERNEL_KINDS, KernelConfig, kernel_matrix
from .regression import ModelState, init_model, update_model

log = logging.getLogger(__name__)


class FrameReadError(RuntimeError):
    """A frame of a sequence could not be loaded."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"frame {index}: {cause}")
        self.index = index


@dataclass(frozen=True)
class TrackerConfig:
    cell_size: int = 4
    sigma: float = 4.0
    lam: float = 1e-4
    gamma: float = 0.01
    search_factor: float = 3.0
    label_bandwidth_factor: float = 0.1
    small_target_area: float = 1000.0
    scale_steps: int = 1
    scale_ratio: float = 1.02
    kernel: str = "gaussian"
    normalize_by_dim: bool = True
    bins: int = 8
    # blend the base filter towards the newest template after each update
    interpolate_template: bool = False
    # parabolic refinement of the response peak between cells
    subcell_peak: bool = True

    def __post_init__(self):
        if int(self.cell_size) != self.cell_size or self.cell_size < 1:
            raise ValueError(f"cell_size must be a positive integer, got {self.cell_size}")
        for name in ("sigma", "lam", "search_factor", "label_bandwidth_factor",
                     "small_target_area", "scale_ratio"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if int(self.scale_steps) != self.scale_steps or self.scale_steps < 1 or self.scale_steps % 2 == 0:
            raise ValueError(f"scale_steps must be an odd integer >= 1, got {self.scale_steps}")
        if self.kernel not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {KERNEL_KINDS}")
        if self.bins < 1:
            raise ValueError("bins must be positive")

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(kind=self.kernel, sigma=self.sigma,
                            normalize_by_dim=self.normalize_by_dim)


@dataclass(frozen=True, eq=False)
class TrackerState:
    model: ModelState
    base_filter: FeatureMap
    target_box: BoundingBox
    resize_ratio: float
    m: int
    n: int
    M: int
    N: int
    config: TrackerConfig
    labels: np.ndarray
    center: tuple[float, float]  # (cx, cy), unclamped
    base_size: tuple[float, float]  # (w, h) at scale 1
    scale: float = 1.0

    @property
    def target_offset(self) -> tuple[int, int]:
        return ((self.M - self.m) // 2, (self.N - self.n) // 2)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def grid_geometry(w: float, h: float, cfg: TrackerConfig):
    """``(resize_ratio, m, n, M, N)`` for a ``w x h`` pixel target."""
    area = w * h
    ratio = math.sqrt(cfg.small_target_area / area) if area < cfg.small_target_area else 1.0
    m = max(1, round_half_up(h * ratio / cfg.cell_size))
    n = max(1, round_half_up(w * ratio / cfg.cell_size))
    side = round_half_up(cfg.search_factor * math.sqrt(m * n))
    return ratio, m, n, max(side, m), max(side, n)


def gaussian_label_map(rows: int, cols: int, peak_row: int, peak_col: int,
                       bandwidth: float) -> np.ndarray:
    """``exp(-(di^2 + dj^2) / (2 bw^2))`` around the peak; exactly 1 at the peak."""
    if not (0 <= peak_row < rows and 0 <= peak_col < cols):
        raise ValueError(f"peak ({peak_row}, {peak_col}) outside {rows}x{cols} grid")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    di = (np.arange(rows) - peak_row)[:, None]
    dj = (np.arange(cols) - peak_col)[None, :]
    return np.exp(-(di * di + dj * dj) / (2.0 * bandwidth ** 2))


def _pixels(frame) -> np.ndarray:
    if isinstance(frame, GrayImage):
        return frame.pixels
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"frame must be 2-D, got shape {arr.shape}")
    return arr


def extract_subwindow(image, center, width: int, height: int) -> GrayImage:
    """``height x width`` crop centred at ``center = (cx, cy)``, edge-replicated outside the image."""
    if width < 1 or height < 1:
        raise ValueError("window must be at least 1x1")
    img = _pixels(image)
    cx, cy = center
    top = round_half_up(cy - height / 2.0)
    left = round_half_up(cx - width / 2.0)
    r = np.clip(np.arange(top, top + height), 0, img.shape[0] - 1)
    c = np.clip(np.arange(left, left + width), 0, img.shape[1] - 1)
    return GrayImage(img[r[:, None], c[None, :]])


def sample_patch(img: np.ndarray, top: float, left: float, rows: int, cols: int,
                 step: float) -> np.ndarray:
    """``rows x cols`` patch whose pixel ``k`` covers ``[top + k*step, top + (k+1)*step)``.

    Integer origin with unit step is a plain crop; otherwise bilinear
    resampling. Outside the image the nearest edge pixel is used.
    """
    if step == 1.0 and float(top).is_integer() and float(left).is_integer():
        r = np.clip(np.arange(int(top), int(top) + rows), 0, img.shape[0] - 1)
        c = np.clip(np.arange(int(left), int(left) + cols), 0, img.shape[1] - 1)
        return img[r[:, None], c[None, :]]
    rr = top + (np.arange(rows) + 0.5) * step - 0.5
    cc = left + (np.arange(cols) + 0.5) * step - 0.5
    grid = np.meshgrid(rr, cc, indexing="ij")
    return map_coordinates(img, grid, order=1, mode="nearest")


def _search_region(img, center, m, n, M, N, cfg: TrackerConfig, step: float):
    """Search-region features and the continuous pixel origin ``(top, left)`` of the patch."""
    cx, cy = center
    oi, oj = (M - m) // 2, (N - n) // 2
    cs = cfg.cell_size
    top = cy - (oi + m / 2.0) * cs * step
    left = cx - (oj + n / 2.0) * cs * step
    if step == 1.0:
        top, left = float(round_half_up(top)), float(round_half_up(left))
    patch = sample_patch(img, top, left, M * cs, N * cs, step)
    return extract_features(patch, cs, cfg.bins), top, left


def _box_inside(box: BoundingBox, width: int, height: int, tol: float = 1e-9) -> bool:
    return (box.x >= -tol and box.y >= -tol
            and box.x + box.w <= width + tol and box.y + box.h <= height + tol)


def init_tracker(frame, init_box: BoundingBox, cfg: TrackerConfig | None = None) -> TrackerState:
    cfg = cfg or TrackerConfig()
    img = _pixels(frame)
    H, W = img.shape
    if init_box.area <= 0:
        raise ValueError("initial box has zero area")
    if not _box_inside(init_box, W, H):
        raise ValueError(f"initial box {init_box.as_tuple()} lies outside the {W}x{H} frame")
    ratio, m, n, M, N = grid_geometry(init_box.w, init_box.h, cfg)
    center = init_box.center
    Z, _, _ = _search_region(img, center, m, n, M, N, cfg, 1.0 / ratio)
    oi, oj = (M - m) // 2, (N - n) // 2
    X0 = FeatureMap(Z.data[oi:oi + m, oj:oj + n])
    labels = gaussian_label_map(M - m + 1, N - n + 1, oi, oj,
                                cfg.label_bandwidth_factor * math.sqrt(m * n))
    K = kernel_matrix(X0, Z, cfg.kernel_config())
    model = init_model(K, labels, cfg.lam, cfg.gamma)
    log.debug("init: ratio=%.4f m=%d n=%d M=%d N=%d", ratio, m, n, M, N)
    return TrackerState(model, X0, init_box, ratio, m, n, M, N, cfg, labels,
                        center, (init_box.w, init_box.h))


def _scale_factors(cfg: TrackerConfig) -> list[float]:
    half = cfg.scale_steps // 2
    # centre first so ties keep the current scale
    ks = [0] + [k for d in range(1, half + 1) for k in (-d, d)]
    return [cfg.scale_ratio ** k for k in ks]


def _subcell_offset(resp: np.ndarray, i: int, j: int):
    def vertex(a, b, c):
        denom = a - 2.0 * b + c
        if denom >= 0:
            return 0.0
        return float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))

    P1, P2 = resp.shape
    di = vertex(resp[i - 1, j], resp[i, j], resp[i + 1, j]) if 0 < i < P1 - 1 else 0.0
    dj = vertex(resp[i, j - 1], resp[i, j], resp[i, j + 1]) if 0 < j < P2 - 1 else 0.0
    return di, dj


def response_map(state: TrackerState, Z) -> np.ndarray:
    """``K' alpha`` reshaped onto the ``(M-m+1) x (N-n+1)`` window grid."""
    K = kernel_matrix(state.base_filter, Z, state.config.kernel_config())
    P1, P2 = K.sample_grid
    return (K.values @ state.model.alpha).reshape(P1, P2)


def peak_location(resp: np.ndarray) -> tuple[int, int]:
    """Argmax with ties going to the lowest row, then the lowest column."""
    i, j = np.unravel_index(int(np.argmax(resp)), resp.shape)
    return int(i), int(j)


def _frame_size_box(state: TrackerState, center, scale, W, H) -> BoundingBox:
    bw, bh = state.base_size
    return BoundingBox.from_center(center[0], center[1], bw * scale, bh * scale).clamped(W, H)


def _locate(state: TrackerState, img: np.ndarray):
    """Best detection over the scale set: ``(center, scale, response, peak)`` or ``None`` if flat."""
    cfg = state.config
    best = None
    for f in _scale_factors(cfg):
        scale = state.scale * f
        step = scale / state.resize_ratio
        Z, top, left = _search_region(img, state.center, state.m, state.n,
                                      state.M, state.N, cfg, step)
        resp = response_map(state, Z)
        peak = float(resp.max())
        if best is None or peak > best[4]:
            best = (top, left, scale, resp, peak, step)
    top, left, scale, resp, peak, step = best
    if np.ptp(resp) <= 1e-12 * max(1.0, abs(peak)):
        return None, resp, peak
    pi, pj = peak_location(resp)
    di, dj = _subcell_offset(resp, pi, pj) if cfg.subcell_peak else (0.0, 0.0)
    cs = cfg.cell_size * step
    cy = top + (pi + di + state.m / 2.0) * cs
    cx = left + (pj + dj + state.n / 2.0) * cs
    return ((cx, cy), scale), resp, peak


def detect(state: TrackerState, frame):
    """``(new_box, response, peak)``; a flat response leaves the box where it was."""
    img = _pixels(frame)
    H, W = img.shape
    loc, resp, peak = _locate(state, img)
    if loc is None:
        return state.target_box.clamped(W, H), resp, peak
    center, scale = loc
    return _frame_size_box(state, center, scale, W, H), resp, peak


def update(state: TrackerState, frame, located_box: BoundingBox) -> TrackerState:
    """Retrain on the search region around ``located_box``."""
    cfg = state.config
    img = _pixels(frame)
    bw, bh = state.base_size
    scale = max(located_box.w / bw, located_box.h / bh)
    center = located_box.center
    Z, _, _ = _search_region(img, center, state.m, state.n, state.M, state.N,
                             cfg, scale / state.resize_ratio)
    K = kernel_matrix(state.base_filter, Z, cfg.kernel_config())
    model = update_model(state.model, K, state.labels)
    base = state.base_filter
    if cfg.interpolate_template:
        oi, oj = state.target_offset
        fresh = Z.data[oi:oi + state.m, oj:oj + state.n]
        base = FeatureMap((1.0 - cfg.gamma) * as_array3(base) + cfg.gamma * fresh)
    return replace(state, model=model, base_filter=base, target_box=located_box,
                   center=center, scale=scale)


def _load(frame, index: int):
    if isinstance(frame, (str, Path)):
        from .io import load_image
        try:
            return load_image(frame)
        except (OSError, ValueError) as exc:
            raise FrameReadError(index, exc) from exc
    return frame


def track_sequence(frames, init_box: BoundingBox, cfg: TrackerConfig | None = None) -> list[BoundingBox]:
    """Track through ``frames`` (images, arrays or paths); one box per frame, first is ``init_box``."""
    cfg = cfg or TrackerConfig()
    it = iter(frames)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("empty frame sequence") from None
    state = init_tracker(_load(first, 0), init_box, cfg)
    boxes = [init_box]
    for k, frame in enumerate(it, start=1):
        img = _load(frame, k)
        box, _, _ = detect(state, img)
        state = update(state, img, box)
        boxes.append(box)
    return boxes
