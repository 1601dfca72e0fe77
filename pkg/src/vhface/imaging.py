"""Grayscale rasters, PGM/PNG I/O, histograms, Otsu threshold and binarization.

Images are stored as read-only ``uint8`` numpy arrays of shape
``(height, width)``; index them as ``pixels[y, x]``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from .errors import CorruptFile, EmptyHistogram, UnsupportedFormat

__all__ = [
    "GrayImage",
    "BinaryImage",
    "Histogram",
    "load_image",
    "save_pgm",
    "save_png",
    "encode_pgm",
    "histogram",
    "otsu_threshold",
    "between_class_scores",
    "binarize",
]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single channel image."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.integer) or np.issubdtype(arr.dtype, np.floating):
                if arr.min() < 0 or arr.max() > 255 or not np.all(arr == np.round(arr)):
                    raise ValueError("pixel values must be integers in [0, 255]")
            else:
                raise ValueError(f"unsupported pixel dtype {arr.dtype}")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))

    @classmethod
    def from_data(cls, width: int, height: int, data) -> "GrayImage":
        """Build from a flat row-major sequence."""
        flat = np.asarray(data)
        if flat.size != width * height:
            raise ValueError(f"data length {flat.size} != {width}x{height}")
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> list[int]:
        return self.pixels.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height})"


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Binarized image; 1 marks the bright (hot) class."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("binary image values must be 0 or 1")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> list[int]:
        return self.pixels.ravel().tolist()

    def count(self) -> int:
        return int(self.pixels.sum(dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class Histogram:
    bins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bins)
        if arr.shape != (256,):
            raise ValueError(f"histogram needs exactly 256 bins, got {arr.shape}")
        if np.any(arr < 0):
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "bins", _frozen(arr, np.int64))

    @property
    def total(self) -> int:
        return int(self.bins.sum())

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return np.array_equal(self.bins, other.bins)


# ---------------------------------------------------------------------------
# file I/O


def _pgm_tokens(raw: bytes, count: int):
    """Read ``count`` header tokens; return them and the offset just past the last."""
    tokens = []
    pos = 0
    n = len(raw)
    while len(tokens) < count:
        while pos < n and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < n and raw[pos : pos + 1] == b"#":
            while pos < n and raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise CorruptFile("truncated PGM header")
        start = pos
        while pos < n and not raw[pos : pos + 1].isspace() and raw[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(raw[start:pos])
    return tokens, pos


def _decode_pgm(raw: bytes) -> GrayImage:
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"not a grayscale PGM (magic {magic!r})")
    tokens, pos = _pgm_tokens(raw[2:], 3)
    pos += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptFile(f"bad PGM header: {exc}") from None
    if width < 1 or height < 1:
        raise CorruptFile(f"bad PGM dimensions {width}x{height}")
    if maxval > 255:
        raise UnsupportedFormat(f"PGM maxval {maxval} > 255 is not supported")
    if maxval < 1:
        raise CorruptFile(f"bad PGM maxval {maxval}")
    npix = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the payload
        if pos >= len(raw) or not raw[pos : pos + 1].isspace():
            raise CorruptFile("missing separator after PGM header")
        payload = raw[pos + 1 : pos + 1 + npix]
        if len(payload) < npix:
            raise CorruptFile(f"truncated PGM payload: {len(payload)} of {npix} bytes")
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = raw[pos:].split()
        if len(body) < npix:
            raise CorruptFile(f"truncated PGM payload: {len(body)} of {npix} samples")
        try:
            values = np.array([int(t) for t in body[:npix]], dtype=np.int64)
        except ValueError as exc:
            raise CorruptFile(f"bad PGM sample: {exc}") from None
        if values.min() < 0:
            raise CorruptFile("negative PGM sample")
    if values.max() > maxval:
        raise CorruptFile(f"sample exceeds maxval {maxval}")
    return GrayImage(values.reshape(height, width))


def _decode_png(raw: bytes) -> GrayImage:
    from PIL import Image

    try:
        with Image.open(io.BytesIO(raw)) as im:
            if im.mode != "L":
                raise UnsupportedFormat(f"PNG mode {im.mode!r} is not 8-bit grayscale")
            im.load()
            arr = np.asarray(im, dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptFile(f"unreadable PNG: {exc}") from None
    return GrayImage(arr)


def load_image(path) -> GrayImage:
    """Read a P2/P5 PGM or an 8-bit grayscale PNG.

    Pixel values are returned exactly as stored; color files are rejected.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw.startswith(PNG_SIGNATURE):
        return _decode_png(raw)
    if raw[:1] == b"P":
        return _decode_pgm(raw)
    raise UnsupportedFormat(f"{os.fspath(path)}: unrecognised image format")


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5 {img.width} {img.height} 255\n".encode("ascii")
    return header + img.pixels.tobytes()


def save_pgm(img: GrayImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))


def save_png(img: GrayImage, path) -> None:
    from PIL import Image

    Image.fromarray(np.ascontiguousarray(img.pixels), mode="L").save(path, format="PNG")


# ---------------------------------------------------------------------------
# histogram, Otsu, binarization


def histogram(img: GrayImage) -> Histogram:
    return Histogram(np.bincount(img.pixels.ravel(), minlength=256))


def between_class_scores(hist: Histogram) -> list[tuple[int, int]]:
    """Between-class variance for every candidate threshold, as exact fractions.

    Entry ``t`` is ``(num, den)`` with ``num / den`` proportional to
    ``w0 * w1 * (mu0 - mu1) ** 2`` for the split ``{v < t} | {v >= t}``.
    The common factor ``1 / N**2`` is dropped.  A split with an empty class
    scores ``(0, 1)``.
    """
    bins = [int(c) for c in hist.bins]
    total = sum(bins)
    total_sum = sum(v * c for v, c in enumerate(bins))
    scores = []
    n0 = 0
    s0 = 0
    for t in range(256):
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            scores.append((0, 1))
        else:
            diff = total * s0 - n0 * total_sum
            scores.append((diff * diff, n0 * n1))
        n0 += bins[t]
        s0 += t * bins[t]
    return scores


def otsu_threshold(hist: Histogram) -> int:
    """Smallest threshold ``t`` maximising the between-class variance.

    Class 0 holds intensities ``< t``, class 1 intensities ``>= t``, the same
    split :func:`binarize` applies.  Scores are compared exactly.
    """
    if hist.total <= 0:
        raise EmptyHistogram("histogram has no mass")
    best_t = 0
    best_num, best_den = 0, 1
    for t, (num, den) in enumerate(between_class_scores(hist)):
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(img: GrayImage, threshold: int) -> BinaryImage:
    return BinaryImage((img.pixels >= threshold).astype(np.uint8))
