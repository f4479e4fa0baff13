"""Image, ground-truth and result file handling.

Netpbm PGM (P2/P5) and PPM (P3/P6) are parsed here directly; colour is
reduced with luma weights 0.299 R + 0.587 G + 0.114 B. Other image formats go
through Pillow when it is installed.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .core import BoundingBox, GrayImage

LUMA = np.array([0.299, 0.587, 0.114])
NETPBM_MAGIC = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}
IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


class ImageFormatError(ValueError):
    """Unsupported or malformed image file."""


class GroundTruthError(ValueError):
    def __init__(self, path, line_no: int, msg: str):
        super().__init__(f"{path}:{line_no}: {msg}")
        self.line_no = line_no


def _header_tokens(data: bytes, count: int):
    """First ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens = []
    pos = 0
    size = len(data)
    while len(tokens) < count:
        while pos < size and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                while pos < size and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated header")
        tokens.append(data[start:pos])
    return tokens, pos


def parse_netpbm(data: bytes) -> np.ndarray:
    """Decode P2/P3/P5/P6 bytes into a float array in [0, 1] (H x W or H x W x 3)."""
    magic = data[:2]
    if magic not in NETPBM_MAGIC:
        raise ImageFormatError(f"not a PGM/PPM file (magic {magic!r})")
    channels, binary = NETPBM_MAGIC[magic]
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError("malformed header") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ImageFormatError(f"bad header values {width}x{height} maxval {maxval}")
    count = width * height * channels
    if binary:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        start = pos + 1  # single whitespace byte after maxval
        raw = data[start:start + count * dtype.itemsize]
        if len(raw) < count * dtype.itemsize:
            raise ImageFormatError("truncated raster")
        vals = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    else:
        body = re.sub(rb"#[^\r\n]*", b"", data[pos:]).split()
        if len(body) < count:
            raise ImageFormatError("truncated raster")
        try:
            vals = np.array([int(t) for t in body[:count]], dtype=np.float64)
        except ValueError:
            raise ImageFormatError("non-integer sample in raster") from None
    if vals.max(initial=0) > maxval:
        raise ImageFormatError("sample exceeds maxval")
    vals /= maxval
    shape = (height, width) if channels == 1 else (height, width, 3)
    return vals.reshape(shape)


def to_gray(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 3:
        arr = arr[..., :3] @ LUMA
    return np.clip(arr, 0.0, 1.0)


def load_image(path) -> GrayImage:
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in NETPBM_MAGIC:
        return GrayImage(to_gray(parse_netpbm(data)))
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError:  # pragma: no cover
        raise ImageFormatError(f"{path}: unsupported format (Pillow not installed)") from None
    try:
        with Image.open(path) as im:
            if im.mode.startswith("I"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            elif im.mode == "F":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode == "L":
                arr = np.asarray(im, dtype=np.float64) / 255.0
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc
    return GrayImage(to_gray(arr))


def write_pgm(path, image) -> None:
    """Binary 8-bit PGM of an image in [0, 1]."""
    px = image.pixels if isinstance(image, GrayImage) else np.asarray(image, dtype=np.float64)
    h, w = px.shape
    raster = np.round(np.clip(px, 0.0, 1.0) * 255.0).astype(np.uint8)
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + raster.tobytes())


def list_sequence(directory) -> list[Path]:
    """Image files of a sequence directory in lexicographic filename order."""
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"sequence directory not found: {d}")
    files = sorted((p for p in d.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES), key=lambda p: p.name)
    if not files:
        raise FileNotFoundError(f"no image files in {d}")
    return files


def parse_box(text: str, one_indexed: bool = False) -> BoundingBox:
    """``x,y,w,h`` separated by commas and/or whitespace."""
    fields = [f for f in re.split(r"[,\s]+", text.strip()) if f]
    if len(fields) != 4:
        raise ValueError(f"expected 4 fields, got {len(fields)}")
    x, y, w, h = (float(f) for f in fields)
    if one_indexed:
        x, y = x - 1.0, y - 1.0
    return BoundingBox(x, y, w, h)


def load_groundtruth(path) -> list[BoundingBox]:
    """One 1-indexed box per line; returned 0-indexed. Blank lines are skipped."""
    boxes = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                boxes.append(parse_box(line, one_indexed=True))
            except ValueError as exc:
                raise GroundTruthError(path, line_no, str(exc)) from None
    return boxes


def write_results(path, boxes) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "x", "y", "w", "h"])
        for k, b in enumerate(boxes):
            w.writerow([k] + [f"{v:.4f}" for v in b.as_tuple()])


def read_results(path) -> list[BoundingBox]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [BoundingBox(float(r["x"]), float(r["y"]), float(r["w"]), float(r["h"])) for r in rows]


def write_metrics(path, metrics) -> None:
    doc = metrics.as_dict() if hasattr(metrics, "as_dict") else dict(metrics)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
