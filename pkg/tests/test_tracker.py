import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbekcf.core import BoundingBox, GrayImage
from nbekcf.features import extract_features
from nbekcf.kernel import KernelConfig, kernel_matrix
from nbekcf.regression import solve_ridge
from nbekcf.tracker import (TrackerConfig, detect, extract_subwindow, gaussian_label_map,
                            grid_geometry, init_tracker, peak_location, response_map,
                            round_half_up, track_sequence, update)
from synthetic import moving_square

CFG = TrackerConfig()


def test_label_map_examples():
    assert np.array_equal(gaussian_label_map(1, 1, 0, 0, 1.0), [[1.0]])
    y = gaussian_label_map(5, 5, 2, 2, 1.0)
    assert y[2, 2] == 1.0
    assert np.array_equal(y, y[::-1]) and np.array_equal(y, y[:, ::-1]) and np.array_equal(y, y.T)
    assert y[0, 0] == pytest.approx(0.01831563888873418, rel=1e-15)
    assert np.sum(y == y.max()) == 1


def test_label_map_errors():
    with pytest.raises(ValueError):
        gaussian_label_map(3, 3, 3, 0, 1.0)
    with pytest.raises(ValueError):
        gaussian_label_map(3, 3, 1, 1, 0.0)


def test_round_half_up():
    assert [round_half_up(v) for v in (12.5, 13.5, 2.49, -0.5)] == [13, 14, 2, 0]


def test_geometry_40x50():
    ratio, m, n, M, N = grid_geometry(w=50, h=40, cfg=CFG)
    assert (ratio, m, n, M, N) == (1.0, 10, 13, 34, 34)


def test_geometry_small_target():
    ratio, m, n, M, N = grid_geometry(20, 20, CFG)
    assert ratio == pytest.approx(1.5811388300841898, rel=1e-15)
    assert (m, n) == (8, 8) and M == N == 24


def test_geometry_search_at_least_target():
    _, m, n, M, N = grid_geometry(400, 40, TrackerConfig(search_factor=1.0))
    assert M >= m and N >= n


def test_config_validation():
    with pytest.raises(ValueError):
        TrackerConfig(gamma=0.0)
    with pytest.raises(ValueError):
        TrackerConfig(gamma=1.0)
    with pytest.raises(ValueError):
        TrackerConfig(scale_steps=2)
    with pytest.raises(ValueError):
        TrackerConfig(sigma=-1)
    with pytest.raises(ValueError):
        TrackerConfig(kernel="rbf")


RAMP = np.arange(16.0).reshape(4, 4) / 15.0


def test_subwindow_inside():
    w = extract_subwindow(GrayImage(RAMP), (2.0, 2.0), 2, 2)
    assert np.array_equal(w.pixels, RAMP[1:3, 1:3])


def test_subwindow_outside():
    w = extract_subwindow(GrayImage(RAMP), (-20.0, 30.0), 3, 2)
    assert np.array_equal(w.pixels, np.full((2, 3), RAMP[3, 0]))


def test_subwindow_half_outside():
    w = extract_subwindow(GrayImage(RAMP), (3.0, 3.0), 4, 3)
    expected = np.array([[9, 10, 11, 11], [13, 14, 15, 15], [13, 14, 15, 15]]) / 15.0
    assert np.array_equal(w.pixels, expected)


@pytest.fixture(scope="module")
def scene():
    frames, gts = moving_square(frames=12, vx=2)
    return frames, gts


def test_init_state(scene):
    frames, gts = scene
    st_ = init_tracker(frames[0], gts[0])
    assert (st_.m, st_.n, st_.M, st_.N) == (10, 10, 30, 30)
    assert st_.resize_ratio == 1.0
    assert st_.base_filter.shape == (10, 10, 9)
    assert st_.model.frame_count == 1
    assert st_.labels.shape == (21, 21) and st_.labels[10, 10] == 1.0


def test_init_errors(scene):
    frames, _ = scene
    with pytest.raises(ValueError):
        init_tracker(frames[0], BoundingBox(290, 10, 20, 20))


def test_self_detection(scene):
    frames, gts = scene
    st_ = init_tracker(frames[0], gts[0])
    box, resp, peak = detect(st_, frames[0])
    assert resp.shape == (21, 21)
    i, j = peak_location(resp)
    assert abs(i - 10) <= 1 and abs(j - 10) <= 1
    assert math.dist(box.center, gts[0].center) <= 4.0
    assert peak == resp.max()


def test_untrained_flat_response(scene):
    frames, gts = scene
    st_ = init_tracker(frames[0], gts[0])
    from dataclasses import replace
    zero = replace(st_, model=replace(st_.model, alpha=np.zeros_like(st_.model.alpha)))
    box, resp, _ = detect(zero, frames[3])
    assert np.all(resp == 0)
    assert box == gts[0]


def test_two_cell_shift_moves_argmax(scene):
    frames, gts = moving_square(frames=5, vx=4)
    cfg = TrackerConfig(subcell_peak=False)
    st_ = init_tracker(frames[0], gts[0], cfg)
    _, resp, _ = detect(st_, frames[2])  # moved 8 px = 2 cells
    assert peak_location(resp) == (10, 12)


def test_update_fixed_point(scene):
    frames, gts = scene
    st_ = init_tracker(frames[0], gts[0])
    a0 = st_.model.alpha
    for _ in range(3):
        st_ = update(st_, frames[0], gts[0])
    assert np.max(np.abs(st_.model.alpha - a0)) <= 1e-6 * np.max(np.abs(a0))
    KS = st_.model.KS
    assert np.max(np.abs(KS - KS.T)) <= 1e-12 * np.max(np.abs(KS))
    np.linalg.cholesky(KS)


def test_template_interpolation_flag(scene):
    frames, gts = scene
    st_ = init_tracker(frames[0], gts[0], TrackerConfig(interpolate_template=True))
    st2 = update(st_, frames[1], gts[1])
    assert not np.array_equal(st2.base_filter.data, st_.base_filter.data)
    fixed = init_tracker(frames[0], gts[0])
    assert update(fixed, frames[1], gts[1]).base_filter == fixed.base_filter


def test_single_frame_sequence(scene):
    frames, gts = scene
    assert track_sequence(frames[:1], gts[0]) == [gts[0]]


def test_empty_sequence(scene):
    with pytest.raises(ValueError):
        track_sequence([], BoundingBox(0, 0, 4, 4))


def test_static_target(scene):
    frames, gts = scene
    boxes = track_sequence([frames[0]] * 10, gts[0])
    for b in boxes:
        assert abs(b.x - gts[0].x) <= 4 and abs(b.y - gts[0].y) <= 4


def test_constant_velocity(scene):
    frames, gts = scene
    boxes = track_sequence(frames, gts[0])
    assert len(boxes) == len(frames)
    for b, g in list(zip(boxes, gts))[2:]:
        assert math.dist(b.center, g.center) <= CFG.cell_size


def test_small_target_resized():
    frames, gts = moving_square(frames=8, size=20, vx=1, height=100, width=120, x0=30, y0=40)
    st_ = init_tracker(frames[0], gts[0])
    assert st_.resize_ratio == pytest.approx(math.sqrt(1000 / 400), rel=1e-15)
    boxes = track_sequence(frames, gts[0])
    for b, g in zip(boxes, gts):
        assert math.dist(b.center, g.center) <= CFG.cell_size


def test_scale_pyramid_runs(scene):
    frames, gts = scene
    boxes = track_sequence(frames[:6], gts[0], TrackerConfig(scale_steps=3))
    for b, g in zip(boxes, gts):
        assert math.dist(b.center, g.center) <= CFG.cell_size
        assert 0.9 <= b.w / g.w <= 1.1


def test_frame_paths_and_read_error(tmp_path, scene):
    from nbekcf.io import write_pgm
    from nbekcf.tracker import FrameReadError
    frames, gts = scene
    paths = []
    for k in range(3):
        p = tmp_path / f"{k:04d}.pgm"
        write_pgm(p, frames[k])
        paths.append(p)
    assert len(track_sequence(paths, gts[0])) == 3
    bad = tmp_path / "0003.pgm"
    bad.write_bytes(b"P5\n10 10\n255\n")
    with pytest.raises(FrameReadError, match="frame 3"):
        track_sequence(paths + [bad], gts[0])


def _feature_scene():
    frames, gts = moving_square(frames=1)
    cx, cy = gts[0].center
    patch = extract_subwindow(frames[0], (cx, cy), 120, 120)
    Z = extract_features(patch, 4, 8).data
    oi = oj = 10
    return Z, Z[oi:oi + 10, oj:oj + 10], gaussian_label_map(21, 21, oi, oj, 1.0)


@given(st.floats(0.05, 20.0))
def test_linear_kernel_scaling_invariance(c):
    Z, X0, y = _feature_scene()
    cfg = KernelConfig(kind="linear")
    alpha = solve_ridge(kernel_matrix(X0, Z, cfg), y, 1e-4)
    base = (kernel_matrix(X0, Z, cfg).values @ alpha)
    scaled = (kernel_matrix(X0, c * Z, cfg).values @ alpha)
    assert np.argmax(scaled) == np.argmax(base)


@given(st.floats(0.25, 4.0))
def test_gaussian_scaled_self_detection(c):
    Z, X0, y = _feature_scene()
    K = kernel_matrix(c * X0, c * Z, KernelConfig())
    alpha = solve_ridge(K, y, 1e-4)
    resp = (K.values @ alpha).reshape(21, 21)
    i, j = peak_location(resp)
    assert abs(i - 10) <= 1 and abs(j - 10) <= 1


def test_tie_breaking():
    r = np.zeros((3, 4))
    r[1, 3] = r[2, 0] = r[1, 2] = 5
    assert peak_location(r) == (1, 2)


@given(st.integers(0, 260), st.integers(0, 120), st.integers(0, 2**16))
def test_boxes_stay_in_frame(x, y, seed):
    rng = np.random.default_rng(seed)
    frames = [rng.random((160, 300)) for _ in range(3)]
    box = BoundingBox(x, y, 40, 40)
    for b in track_sequence(frames, box):
        assert b.x >= 0 and b.y >= 0 and b.x + b.w <= 300 + 1e-9 and b.y + b.h <= 160 + 1e-9
