"""Kernelized correlation-filter tracking on real (non-wrapped) dense samples.

Fast paths: ACSII (window norms from a squared integral image) and CCIM
(all circulant-filter correlations from an integral matrix).
"""
from .acsii import autocorrelation, integral_image
from .ccim import circulant_correlation
from .core import BoundingBox, FeatureMap, GrayImage, ShapeError, make_feature_map, make_matrix
from .cyclic import ShiftSpec, cyclic_shift, cyclic_shift_map
from .eval import TrackingMetrics, center_error, overlap_ratio, summarize
from .kernel import KernelConfig, KernelMatrix, gram_kernel_matrix, kernel_matrix
from .regression import ModelState, direct_multiframe_solution, init_model, solve_ridge, update_model
from .tracker import TrackerConfig, TrackerState, detect, init_tracker, track_sequence, update

__version__ = "0.1.0"

__all__ = [
    "autocorrelation", "integral_image", "circulant_correlation",
    "BoundingBox", "FeatureMap", "GrayImage", "ShapeError", "make_feature_map", "make_matrix",
    "ShiftSpec", "cyclic_shift", "cyclic_shift_map",
    "TrackingMetrics", "center_error", "overlap_ratio", "summarize",
    "KernelConfig", "KernelMatrix", "gram_kernel_matrix", "kernel_matrix",
    "ModelState", "direct_multiframe_solution", "init_model", "solve_ridge", "update_model",
    "TrackerConfig", "TrackerState", "detect", "init_tracker", "track_sequence", "update",
]
