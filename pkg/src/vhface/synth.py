"""Deterministic synthetic face images with landmark annotations.

A face is a filled ellipse of warm (bright) pixels on a cooler background,
both with independent Gaussian noise.  Visible-spectrum images under IR or
NA illumination also get a left-to-right brightness ramp.  Landmark boxes
sit at fixed fractions of the ellipse's bounding box.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .bench import ILLUMINATIONS, SPECTRA, GroundTruth, save_ground_truth
from .errors import BoxOutOfBounds, InvalidParams
from .imaging import GrayImage, save_pgm
from .vh import FaceBox

__all__ = [
    "SynthParams",
    "GRADIENT_AMPLITUDE",
    "generate_face",
    "ground_truth_for",
    "random_params",
    "write_dataset",
    "render_overlay",
]

# VIS only; thermal imagery does not see the illumination
GRADIENT_AMPLITUDE = {"AR": 0.0, "IR": 25.0, "NA": 60.0}

MARGIN = 2
NECK_ALLOWANCE = 0.15


@dataclass(frozen=True)
class SynthParams:
    width: int = 320
    height: int = 240
    center: tuple[float, float] = (160.0, 125.0)
    axes: tuple[float, float] = (48.0, 66.0)  # semi-axes (x, y)
    face_mean: float = 200.0
    face_sigma: float = 6.0
    background_mean: float = 60.0
    background_sigma: float = 6.0
    seed: int = 0
    spectrum: str = "TH"
    illumination: str = "AR"

    def validate(self) -> None:
        if self.width < 8 or self.height < 8:
            raise InvalidParams(f"image {self.width}x{self.height} too small")
        cx, cy = self.center
        a, b = self.axes
        if a <= 0 or b <= 0:
            raise InvalidParams(f"bad ellipse axes {self.axes}")
        if cx - a < MARGIN or cy - b < MARGIN or cx + a > self.width - 1 - MARGIN or cy + b > self.height - 1 - MARGIN:
            raise InvalidParams("face ellipse must keep a 2-pixel margin inside the frame")
        if self.face_sigma < 0 or self.background_sigma < 0:
            raise InvalidParams("noise sigma must be >= 0")
        if self.face_mean - self.background_mean < 4 * (self.face_sigma + self.background_sigma):
            raise InvalidParams("face and background are not separable (need a 4-sigma gap)")
        if self.spectrum not in SPECTRA:
            raise InvalidParams(f"unknown spectrum {self.spectrum!r}")
        if self.illumination not in ILLUMINATIONS:
            raise InvalidParams(f"unknown illumination {self.illumination!r}")


def _face_mask(p: SynthParams) -> np.ndarray:
    cx, cy = p.center
    a, b = p.axes
    ys, xs = np.mgrid[0 : p.height, 0 : p.width]
    return ((xs - cx) / a) ** 2 + ((ys - cy) / b) ** 2 <= 1.0


def _band(cx, half, top, frac_lo, frac_hi, height_span, a):
    return FaceBox(
        math.floor(cx + half[0] * a),
        math.floor(top + frac_lo * height_span),
        math.ceil(cx + half[1] * a),
        math.ceil(top + frac_hi * height_span),
    )


def ground_truth_for(p: SynthParams) -> GroundTruth:
    """Landmarks: brows at 32 %, eyes at 40 %, lips at 75 % of the face height."""
    cx, cy = p.center
    a, b = p.axes
    top, span = cy - b, 2 * b
    half = 0.03  # half height of each landmark band, as a fraction of span
    landmarks = {
        "brows": _band(cx, (-0.55, 0.55), top, 0.32 - half, 0.32 + half, span, a),
        "left_eye": _band(cx, (-0.55, -0.15), top, 0.40 - half, 0.40 + half, span, a),
        "right_eye": _band(cx, (0.15, 0.55), top, 0.40 - half, 0.40 + half, span, a),
        "lips": _band(cx, (-0.30, 0.30), top, 0.75 - half, 0.75 + half, span, a),
    }
    mask = _face_mask(p)
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    y2 = int(rows[-1]) + 1
    extent = FaceBox(
        int(cols[0]),
        int(rows[0]),
        int(cols[-1]) + 1,
        min(p.height, y2 + math.floor(NECK_ALLOWANCE * (y2 - int(rows[0])) + 0.5)),
    )
    return GroundTruth(landmarks, extent)


def generate_face(p: SynthParams = SynthParams()) -> tuple[GrayImage, GroundTruth]:
    p.validate()
    rng = np.random.default_rng(p.seed)
    mask = _face_mask(p)
    img = np.where(mask, p.face_mean, p.background_mean).astype(np.float64)
    img += np.where(mask, p.face_sigma, p.background_sigma) * rng.standard_normal(mask.shape)
    if p.spectrum == "VIS":
        amp = GRADIENT_AMPLITUDE[p.illumination]
        img += amp * np.linspace(0.0, 1.0, p.width)[np.newaxis, :]
    pixels = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return GrayImage(pixels), ground_truth_for(p)


def random_params(rng: np.random.Generator, spectrum="TH", illumination="AR", seed=0, width=320, height=240):
    """Draw a varied but valid face layout.

    Height/width ratios stay in [1.32, 1.45] so the 13:9 chin estimate lands
    inside the neck allowance.
    """
    a = rng.uniform(36.0, 54.0)
    b = a * rng.uniform(1.32, 1.45)
    margin = MARGIN + 2
    cx = rng.uniform(a + margin, width - 1 - a - margin)
    cy = rng.uniform(b + margin, height - 1 - b - margin)
    return SynthParams(
        width=width,
        height=height,
        center=(cx, cy),
        axes=(a, b),
        face_mean=rng.uniform(175.0, 215.0),
        face_sigma=rng.uniform(3.0, 9.0),
        background_mean=rng.uniform(40.0, 80.0),
        background_sigma=rng.uniform(3.0, 9.0),
        seed=seed,
        spectrum=spectrum,
        illumination=illumination,
    )


def write_dataset(out_dir, count: int, seed: int = 0, spectrum="TH", illumination=None, vary=True):
    """Write ``count`` images, their ground truth and ``manifest.json``.

    Illumination cycles AR/IR/NA unless fixed.  With ``vary=False`` every
    image uses the default layout and only the noise seed changes.
    """
    if count < 1:
        raise InvalidParams("count must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = np.random.SeedSequence(seed).spawn(count)
    manifest = []
    for i, ss in enumerate(seeds):
        illum = illumination or ILLUMINATIONS[i % len(ILLUMINATIONS)]
        image_seed = int(ss.generate_state(1)[0])
        if vary:
            params = random_params(np.random.default_rng(ss), spectrum, illum, seed=image_seed)
        else:
            params = replace(SynthParams(), seed=image_seed, spectrum=spectrum, illumination=illum)
        img, gt = generate_face(params)
        stem = f"face_{i:04d}_{spectrum.lower()}_{illum.lower()}"
        save_pgm(img, out / f"{stem}.pgm")
        save_ground_truth(gt, out / f"{stem}.json")
        manifest.append({
            "image": f"{stem}.pgm",
            "spectrum": spectrum,
            "illumination": illum,
            "ground_truth": f"{stem}.json",
        })
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path


def render_overlay(img: GrayImage, box: FaceBox) -> GrayImage:
    """Draw the one-pixel outline of ``box`` at full intensity."""
    if not box.fits(img.width, img.height):
        raise BoxOutOfBounds(f"box {box.as_tuple()} outside {img.width}x{img.height}")
    px = img.pixels.copy()
    px[box.y1, box.x1 : box.x2] = 255
    px[box.y2 - 1, box.x1 : box.x2] = 255
    px[box.y1 : box.y2, box.x1] = 255
    px[box.y1 : box.y2, box.x2 - 1] = 255
    return GrayImage(px)
