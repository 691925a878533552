"""Page image preparation ahead of OCR.

Scanned protocol pages are binarized with Otsu's global threshold and
deskewed by maximizing the variance of the horizontal projection profile.
The OCR engine itself sits behind :class:`OcrEngine`; the reference
adapter reads pre-extracted text files so the pipeline runs without one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

logger = logging.getLogger(__name__)

SKEW_LIMIT = 5.0  # degrees searched either side of horizontal
SKEW_STEP_TENTHS = 1  # search step in tenths of a degree
DARK_LEVEL = 128  # pixels below this count as ink


class EmptyImageError(ValueError):
    """Raised when a histogram holds no pixels."""


@dataclass(frozen=True)
class GrayBitmap:
    """8-bit grayscale page, row-major, shape ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"bitmap must be 2-D, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("bitmap must have positive width and height")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_flat(cls, width: int, height: int, values) -> GrayBitmap:
        flat = np.asarray(values)
        if width <= 0 or height <= 0:
            raise ValueError("width and height must be positive")
        if flat.size != width * height:
            raise ValueError(
                f"expected {width * height} pixels, got {flat.size}")
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayBitmap):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True)
class SkewEstimate:
    angle: float
    confidence: float


def histogram(bitmap: GrayBitmap) -> np.ndarray:
    """Return the 256-bin intensity histogram of ``bitmap``."""
    return np.bincount(bitmap.pixels.ravel(), minlength=256).astype(np.int64)


def otsu_threshold(hist) -> int:
    """Level ``t`` maximizing between-class variance of ``{<= t}`` vs ``{> t}``.

    The variance is compared exactly in integer arithmetic. For a split
    with ``n0`` pixels of summed intensity ``s0`` out of ``n`` pixels of
    total intensity ``s``, the between-class variance is proportional to
    ``(n * s0 - s * n0) ** 2 / (n0 * n1)``. Ties go to the smallest level;
    a one-sided split scores zero.
    """
    counts = [int(c) for c in hist]
    if len(counts) != 256:
        raise ValueError(f"histogram must have 256 bins, got {len(counts)}")
    if any(c < 0 for c in counts):
        raise ValueError("histogram counts must be non-negative")
    n = sum(counts)
    if n == 0:
        raise EmptyImageError("histogram is empty; image has no pixels")
    s = sum(level * c for level, c in enumerate(counts))

    best_t, best_num, best_den = 0, 0, 1
    n0 = s0 = 0
    for t in range(256):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        num = (n * s0 - s * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(bitmap: GrayBitmap, t: int) -> GrayBitmap:
    out = np.where(bitmap.pixels <= t, 0, 255).astype(np.uint8)
    return GrayBitmap(out)


def _centre(bitmap: GrayBitmap) -> tuple[float, float]:
    return (bitmap.width - 1) / 2.0, (bitmap.height - 1) / 2.0


def rotate(bitmap: GrayBitmap, angle: float) -> GrayBitmap:
    """Rotate counter-clockwise (as displayed) about the image centre.

    Nearest-neighbour sampling; pixels mapped from outside the frame are
    filled white. Dimensions are unchanged.
    """
    if abs(angle) > 45:
        raise ValueError(f"rotation angle {angle} outside [-45, 45]")
    if angle == 0:
        return GrayBitmap(bitmap.pixels.copy())
    h, w = bitmap.height, bitmap.width
    cx, cy = _centre(bitmap)
    theta = math.radians(angle)
    c, s = math.cos(theta), math.sin(theta)
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - cx
    dy = ys - cy
    # inverse mapping: output pixel -> source pixel
    src_x = np.rint(cx + c * dx - s * dy).astype(np.int64)
    src_y = np.rint(cy + s * dx + c * dy).astype(np.int64)
    inside = (src_x >= 0) & (src_x < w) & (src_y >= 0) & (src_y < h)
    out = np.full((h, w), 255, dtype=np.uint8)
    out[inside] = bitmap.pixels[src_y[inside], src_x[inside]]
    return GrayBitmap(out)


def _candidate_angles() -> list[float]:
    steps = int(round(SKEW_LIMIT * 10 / SKEW_STEP_TENTHS))
    tenths = [k * SKEW_STEP_TENTHS for k in range(-steps, steps + 1)]
    # visit small corrections first so ties favour the smaller rotation
    tenths.sort(key=lambda k: (abs(k), k))
    return [k / 10.0 for k in tenths]


def estimate_skew(bitmap: GrayBitmap) -> SkewEstimate:
    """Find the correction angle that makes text rows horizontal.

    Every candidate in [-5, 5] degrees (0.1 degree steps) is scored by the
    variance of the row sums of dark pixels after rotating by it; the
    returned angle is the one to pass to :func:`rotate`.
    """
    ys, xs = np.nonzero(bitmap.pixels < DARK_LEVEL)
    if xs.size == 0:
        return SkewEstimate(0.0, 0.0)
    cx, cy = _centre(bitmap)
    dx = xs.astype(np.float64) - cx
    dy = ys.astype(np.float64) - cy
    radius = math.hypot(bitmap.width, bitmap.height) / 2.0
    lo = math.floor(cy - radius) - 1
    nbins = int(math.ceil(2 * radius)) + 4

    scores = {}
    for angle in _candidate_angles():
        theta = math.radians(angle)
        row = cy - math.sin(theta) * dx + math.cos(theta) * dy
        idx = np.rint(row).astype(np.int64) - lo
        profile = np.bincount(idx, minlength=nbins)
        scores[angle] = float(np.var(profile))

    best = max(scores, key=scores.__getitem__)  # first max in visit order
    mean = sum(scores.values()) / len(scores)
    confidence = (scores[best] - mean) / mean if mean > 0 else 0.0
    return SkewEstimate(best, confidence)


def deskew(bitmap: GrayBitmap) -> tuple[GrayBitmap, SkewEstimate]:
    est = estimate_skew(bitmap)
    if est.angle == 0:
        return bitmap, est
    return rotate(bitmap, est.angle), est


def prepare_page(bitmap: GrayBitmap) -> tuple[GrayBitmap, int, SkewEstimate]:
    """Binarize with Otsu's threshold, then deskew."""
    t = otsu_threshold(histogram(bitmap))
    binary = binarize(bitmap, t)
    straight, est = deskew(binary)
    return straight, t, est


# -- PGM io --------------------------------------------------------------

def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates header and raster
    return tokens, pos + 1


def read_pgm(path) -> GrayBitmap:
    data = Path(path).read_bytes()
    (magic, w, h, maxval), offset = _pgm_tokens(data, 4)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width, height, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height,
                           offset=offset)
    return GrayBitmap.from_flat(width, height, raster.copy())


def write_pgm(path, bitmap: GrayBitmap) -> None:
    header = f"P5\n{bitmap.width} {bitmap.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + bitmap.pixels.tobytes())


# -- OCR adapter ---------------------------------------------------------

class OcrEngine(Protocol):
    def recognize(self, bitmap: GrayBitmap, page_path: Path) -> list[str]:
        ...


class TextFileOcr:
    """Reads page text from ``<page>.txt`` next to the page image."""

    def expected_text_path(self, page_path) -> Path:
        return Path(page_path).with_suffix(".txt")

    def recognize(self, bitmap: GrayBitmap, page_path) -> list[str]:
        text_path = self.expected_text_path(page_path)
        if not text_path.exists():
            raise FileNotFoundError(f"no OCR text for page {page_path}")
        return text_path.read_text(encoding="utf-8").splitlines()
