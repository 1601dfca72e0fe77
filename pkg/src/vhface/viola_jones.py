"""Viola-Jones style cascade evaluation and multiscale detection.

Feature values are normalized in two ways before they meet a stump
threshold.  Each rect sum is multiplied by ``weight * base_area /
scaled_area``, which keeps a balanced feature at zero on flat input after the
rect has been rounded to the scaled grid.  The weighted total is then divided
by the window's pixel standard deviation, read from the squared-sum table.
Flat windows (zero variance) are always rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cascade import Cascade
from .errors import WindowOutOfBounds
from .imaging import GrayImage
from .integral import IntegralImage, integral_image
from .vh import FaceBox

__all__ = [
    "Detection",
    "WindowResult",
    "ScaledCascade",
    "scale_cascade",
    "evaluate_window",
    "detect_multiscale",
    "group_hits",
]


def _round(v: float) -> int:
    return math.floor(v + 0.5)


@dataclass(frozen=True)
class Detection:
    box: FaceBox
    score: float
    neighbors: int


@dataclass(frozen=True)
class WindowResult:
    accepted: bool
    score: float
    stages_passed: int

    def __bool__(self):
        return self.accepted


@dataclass(frozen=True)
class _ScaledStump:
    rects: tuple[tuple[int, int, int, int, float], ...]  # x, y, w, h, effective weight
    threshold: float
    left: float
    right: float


@dataclass(frozen=True)
class ScaledCascade:
    window: tuple[int, int]
    stages: tuple[tuple[float, tuple[_ScaledStump, ...]], ...]


def scale_cascade(cascade: Cascade, scale: float) -> ScaledCascade:
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    bw, bh = cascade.base_window
    ww, wh = _round(bw * scale), _round(bh * scale)
    stages = []
    for stage in cascade.stages:
        stumps = []
        for stump in stage.stumps:
            rects = []
            for r in stump.feature.rects:
                x = min(_round(r.x * scale), ww - 1)
                y = min(_round(r.y * scale), wh - 1)
                w = max(1, min(_round(r.w * scale), ww - x))
                h = max(1, min(_round(r.h * scale), wh - y))
                rects.append((x, y, w, h, r.weight * r.area / (w * h)))
            stumps.append(_ScaledStump(tuple(rects), stump.threshold, stump.left, stump.right))
        stages.append((stage.threshold, tuple(stumps)))
    return ScaledCascade((ww, wh), tuple(stages))


def evaluate_window(
    ii: IntegralImage, cascade: Cascade | ScaledCascade, origin, scale: float = 1.0
) -> WindowResult:
    """Run the cascade on one window with top-left corner ``origin``.

    ``score`` is the summed margin ``stage_sum - stage_threshold`` over the
    stages that were evaluated; it is only meaningful for accepted windows.
    """
    sc = cascade if isinstance(cascade, ScaledCascade) else scale_cascade(cascade, scale)
    ox, oy = origin
    ww, wh = sc.window
    if ox < 0 or oy < 0 or ox + ww > ii.width or oy + wh > ii.height:
        raise WindowOutOfBounds(
            f"window {ww}x{wh} at {origin} exceeds image {ii.width}x{ii.height}"
        )
    n = ww * wh
    s = ii.rect_sum(ox, oy, ox + ww, oy + wh)
    sq = ii.rect_sq_sum(ox, oy, ox + ww, oy + wh)
    var_num = n * sq - s * s
    if var_num <= 0:
        return WindowResult(False, 0.0, 0)
    sigma = math.sqrt(var_num) / n

    score = 0.0
    for i, (stage_threshold, stumps) in enumerate(sc.stages):
        total = 0.0
        for stump in stumps:
            value = 0.0
            for x, y, w, h, weight in stump.rects:
                value += weight * ii.rect_sum(ox + x, oy + y, ox + x + w, oy + y + h)
            value /= sigma
            total += stump.left if value < stump.threshold else stump.right
        score += total - stage_threshold
        if total < stage_threshold:
            return WindowResult(False, score, i)
    return WindowResult(True, score, len(sc.stages))


def _scan_scale(ii: IntegralImage, sc: ScaledCascade, stride: int):
    """Accepted windows at one scale, batched over all strided origins."""
    ww, wh = sc.window
    xs = np.arange(0, ii.width - ww + 1, stride)
    ys = np.arange(0, ii.height - wh + 1, stride)
    if len(xs) == 0 or len(ys) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    ox = gx.ravel()
    oy = gy.ravel()
    t = ii.table
    row = t.shape[1]
    flat = t.ravel()
    flat_sq = ii.squared.ravel()
    base = oy * row + ox

    def box(tbl, x, y, w, h):
        a = base + (y * row + x)
        return tbl[a + (h * row + w)] - tbl[a + h * row] - tbl[a + w] + tbl[a]

    n = ww * wh
    s = box(flat, 0, 0, ww, wh)
    var_num = n * box(flat_sq, 0, 0, ww, wh) - s * s
    keep = var_num > 0
    base = base[keep]
    sigma = np.sqrt(var_num[keep].astype(np.float64)) / n
    score = np.zeros(len(base))
    alive = np.flatnonzero(keep)

    for stage_threshold, stumps in sc.stages:
        if len(base) == 0:
            break
        total = np.zeros(len(base))
        for stump in stumps:
            value = np.zeros(len(base))
            for x, y, w, h, weight in stump.rects:
                value += weight * box(flat, x, y, w, h).astype(np.float64)
            value /= sigma
            total += np.where(value < stump.threshold, stump.left, stump.right)
        score += total - stage_threshold
        passed = total >= stage_threshold
        base, sigma, score, total = base[passed], sigma[passed], score[passed], total[passed]
        alive = alive[passed]
    return ox[alive], oy[alive], score


def group_hits(hits: list[Detection], min_neighbors: int = 1, iou_threshold: float = 0.5):
    """Merge raw windows whose IoU reaches ``iou_threshold`` (transitively)."""
    parent = list(range(len(hits)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    boxes = np.array([h.box.as_tuple() for h in hits], dtype=np.int64).reshape(-1, 4)
    areas = (boxes[:, 2] - boxes[:, 0]) * (boxes[:, 3] - boxes[:, 1])
    for i in range(len(hits) - 1):
        rest = boxes[i + 1 :]
        iw = np.minimum(rest[:, 2], boxes[i, 2]) - np.maximum(rest[:, 0], boxes[i, 0])
        ih = np.minimum(rest[:, 3], boxes[i, 3]) - np.maximum(rest[:, 1], boxes[i, 1])
        inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
        union = areas[i] + areas[i + 1 :] - inter
        # inter / union >= t, compared without division
        for j in np.flatnonzero((inter > 0) & (inter >= iou_threshold * union)) + i + 1:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[Detection]] = {}
    for i, hit in enumerate(hits):
        groups.setdefault(find(i), []).append(hit)

    out = []
    for members in groups.values():
        count = sum(m.neighbors for m in members)
        if count < min_neighbors:
            continue
        coords = np.array([m.box.as_tuple() for m in members], dtype=np.float64).mean(axis=0)
        x1, y1, x2, y2 = (_round(c) for c in coords)
        out.append(Detection(FaceBox(x1, y1, x2, y2), max(m.score for m in members), count))
    out.sort(key=lambda d: (-d.neighbors, -d.score, d.box.as_tuple()))
    return out


def detect_multiscale(
    img: GrayImage,
    cascade: Cascade,
    scale_step: float = 1.1,
    stride: int = 1,
    min_neighbors: int = 3,
    ii: IntegralImage | None = None,
) -> list[Detection]:
    """Slide the cascade over every scale and position, then group the hits.

    Scales run ``1, scale_step, scale_step**2, ...`` while the scaled window
    fits in the image.  Output is ordered by neighbour count, then score.
    """
    if scale_step <= 1:
        raise ValueError("scale_step must be > 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if min_neighbors < 1:
        raise ValueError("min_neighbors must be >= 1")
    if ii is None:
        ii = integral_image(img)
    bw, bh = cascade.base_window
    hits = []
    k = 0
    while True:
        scale = scale_step**k
        ww, wh = _round(bw * scale), _round(bh * scale)
        if ww > img.width or wh > img.height:
            break
        sc = scale_cascade(cascade, scale)
        xs, ys, scores = _scan_scale(ii, sc, stride)
        for x, y, score in zip(xs.tolist(), ys.tolist(), scores.tolist()):
            hits.append(Detection(FaceBox(x, y, x + ww, y + wh), score, 1))
        k += 1
    return group_hits(hits, min_neighbors)
