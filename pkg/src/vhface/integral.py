"""Summed-area tables.

``table[y, x]`` holds the sum of all pixels in ``[0, x) x [0, y)``, so the
table is one larger than the image along both axes and its first row and
column are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import GrayImage

__all__ = ["IntegralImage", "integral_image"]


def _cumulative(arr: np.ndarray) -> np.ndarray:
    h, w = arr.shape
    table = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(arr, axis=0, out=table[1:, 1:])
    np.cumsum(table[1:, 1:], axis=1, out=table[1:, 1:])
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class IntegralImage:
    table: np.ndarray
    squared: np.ndarray

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1

    def rect_sum(self, x1: int, y1: int, x2: int, y2: int) -> int:
        """Pixel sum over ``[x1, x2) x [y1, y2)`` in four lookups."""
        t = self.table
        return int(t[y2, x2] - t[y2, x1] - t[y1, x2] + t[y1, x1])

    def rect_sq_sum(self, x1: int, y1: int, x2: int, y2: int) -> int:
        s = self.squared
        return int(s[y2, x2] - s[y2, x1] - s[y1, x2] + s[y1, x1])


def integral_image(img: GrayImage) -> IntegralImage:
    px = img.pixels.astype(np.int64)
    return IntegralImage(_cumulative(px), _cumulative(px * px))
