"""Face localisation from vertical and horizontal projection profiles.

The detector binarizes the image with Otsu's threshold, takes the per-row
foreground counts to find the top of the head, takes the per-column counts of
the band below it to find the left and right limits, and places the chin with
the fixed 13:9 height/width ratio.  It never trains and returns at most one
face per image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateBox, DegenerateWidth, InvalidRange, NoFaceFound
from .imaging import BinaryImage, GrayImage, binarize, histogram, otsu_threshold

__all__ = [
    "FaceBox",
    "ProjectionProfile",
    "VhParams",
    "vertical_projection",
    "horizontal_projection",
    "find_top_border",
    "find_horizontal_limits",
    "compute_bottom",
    "segment_face",
]


@dataclass(frozen=True)
class FaceBox:
    """Half-open rectangle ``[x1, x2) x [y1, y2)``."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"empty box {self.as_tuple()}")

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x1, self.y1, self.x2, self.y2)

    def as_dict(self) -> dict[str, int]:
        return {"x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2}

    @classmethod
    def from_dict(cls, d) -> "FaceBox":
        return cls(int(d["x1"]), int(d["y1"]), int(d["x2"]), int(d["y2"]))

    def contains(self, other: "FaceBox") -> bool:
        return (
            self.x1 <= other.x1
            and self.y1 <= other.y1
            and other.x2 <= self.x2
            and other.y2 <= self.y2
        )

    def fits(self, width: int, height: int) -> bool:
        return 0 <= self.x1 and 0 <= self.y1 and self.x2 <= width and self.y2 <= height

    def translated(self, dx: int, dy: int) -> "FaceBox":
        return FaceBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def iou(self, other: "FaceBox") -> float:
        iw = min(self.x2, other.x2) - max(self.x1, other.x1)
        ih = min(self.y2, other.y2) - max(self.y1, other.y1)
        if iw <= 0 or ih <= 0:
            return 0.0
        inter = iw * ih
        return inter / (self.area + other.area - inter)


@dataclass(frozen=True, eq=False)
class ProjectionProfile:
    axis: Literal["vertical", "horizontal"]
    values: np.ndarray

    def __post_init__(self):
        if self.axis not in ("vertical", "horizontal"):
            raise ValueError(f"unknown axis {self.axis!r}")
        arr = np.array(self.values, dtype=np.int64, copy=True)
        if arr.ndim != 1 or np.any(arr < 0):
            raise ValueError("profile must be a 1-D array of non-negative counts")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, ProjectionProfile):
            return NotImplemented
        return self.axis == other.axis and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class VhParams:
    """Tuning of the border search.

    A profile entry counts as face when it reaches
    ``border_fraction * max(profile)``; the top border additionally needs
    ``min_run`` consecutive such rows.
    """

    border_fraction: float = 0.10
    min_run: int = 2
    aspect_num: int = 13
    aspect_den: int = 9

    def __post_init__(self):
        if not 0 < self.border_fraction < 1:
            raise ValueError("border_fraction must lie in (0, 1)")
        if self.min_run < 1:
            raise ValueError("min_run must be >= 1")
        if self.aspect_num < 1 or self.aspect_den < 1:
            raise ValueError("aspect ratio terms must be positive integers")


def vertical_projection(binary: BinaryImage) -> ProjectionProfile:
    """Foreground count of each row."""
    return ProjectionProfile("vertical", binary.pixels.sum(axis=1, dtype=np.int64))


def horizontal_projection(binary: BinaryImage, row_range=None) -> ProjectionProfile:
    """Foreground count of each column restricted to rows ``[y_a, y_b)``."""
    if row_range is None:
        row_range = (0, binary.height)
    y_a, y_b = row_range
    if not 0 <= y_a < y_b <= binary.height:
        raise InvalidRange(f"row range [{y_a}, {y_b}) outside [0, {binary.height})")
    return ProjectionProfile("horizontal", binary.pixels[y_a:y_b].sum(axis=0, dtype=np.int64))


def _face_mask(values: np.ndarray, fraction: float) -> np.ndarray:
    peak = int(values.max()) if len(values) else 0
    if peak == 0:
        raise NoFaceFound("projection profile is empty")
    return values >= fraction * peak


def find_top_border(profile: ProjectionProfile, params: VhParams = VhParams()) -> int:
    if profile.axis != "vertical":
        raise ValueError("top border needs a vertical (per-row) profile")
    mask = _face_mask(profile.values, params.border_fraction)
    run = 0
    for y, hit in enumerate(mask):
        run = run + 1 if hit else 0
        if run == params.min_run:
            return y - params.min_run + 1
    raise NoFaceFound(f"no run of {params.min_run} face rows")


def find_horizontal_limits(
    profile: ProjectionProfile, params: VhParams = VhParams()
) -> tuple[int, int]:
    """First face column and one past the last face column."""
    if profile.axis != "horizontal":
        raise ValueError("horizontal limits need a horizontal (per-column) profile")
    cols = np.flatnonzero(_face_mask(profile.values, params.border_fraction))
    x1, x2 = int(cols[0]), int(cols[-1]) + 1
    if x2 - x1 < 2:
        raise DegenerateWidth(f"face width {x2 - x1} < 2")
    return x1, x2


def compute_bottom(
    y1: int, x1: int, x2: int, image_height: int, params: VhParams = VhParams()
) -> int:
    """Chin row from the face width, rounded half up and clipped to the image."""
    if x2 <= x1:
        raise DegenerateBox(f"x2={x2} <= x1={x1}")
    if not 0 <= y1 < image_height:
        raise DegenerateBox(f"y1={y1} outside image of height {image_height}")
    num, den = params.aspect_num, params.aspect_den
    # floor(w * num / den + 1/2) in integers
    extent = (2 * (x2 - x1) * num + den) // (2 * den)
    y2 = min(image_height, y1 + extent)
    if y2 <= y1:
        raise DegenerateBox(f"y2={y2} <= y1={y1}")
    return y2


def segment_face(img: GrayImage, params: VhParams = VhParams()) -> FaceBox:
    hist = histogram(img)
    if np.count_nonzero(hist.bins) < 2:
        raise NoFaceFound("uniform image")
    binary = binarize(img, otsu_threshold(hist))

    y1 = find_top_border(vertical_projection(binary), params)
    band_end = y1 + (img.height - y1) // 2
    if band_end <= y1:
        raise NoFaceFound(f"top border {y1} leaves no band below it")
    x1, x2 = find_horizontal_limits(horizontal_projection(binary, (y1, band_end)), params)
    y2 = compute_bottom(y1, x1, x2, img.height, params)
    return FaceBox(x1, y1, x2, y2)
