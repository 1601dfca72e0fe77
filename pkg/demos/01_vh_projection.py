"""Walk through the VH projection detector one step at a time.

    python demos/01_vh_projection.py [out_dir]

Writes the synthetic input, its binarized version and the result overlay.
"""

import sys
from pathlib import Path

from vhface.imaging import GrayImage, binarize, histogram, otsu_threshold, save_png
from vhface.synth import SynthParams, generate_face, render_overlay
from vhface.vh import (
    VhParams,
    compute_bottom,
    find_horizontal_limits,
    find_top_border,
    horizontal_projection,
    segment_face,
    vertical_projection,
)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

# a 320x240 thermal-style face: warm ellipse, cool background, Gaussian noise
img, gt = generate_face(SynthParams(seed=7))
save_png(img, out / "face.png")

# step 1: Otsu threshold, then 0 below T and 1 at or above it
T = otsu_threshold(histogram(img))
binary = binarize(img, T)
print(f"Otsu threshold T = {T}; {binary.count()} of {img.width * img.height} pixels are warm")
save_png(GrayImage(binary.pixels * 255), out / "binary.png")

# step 2-3: per-row counts, the top border is the first sustained face row
params = VhParams()
rows = vertical_projection(binary)
y1 = find_top_border(rows, params)
print(f"vertical profile peaks at {rows.values.max()} pixels per row; top border y1 = {y1}")

# step 4-5: per-column counts over the upper half of what is left below y1
band = (y1, y1 + (img.height - y1) // 2)
cols = horizontal_projection(binary, band)
x1, x2 = find_horizontal_limits(cols, params)
print(f"band rows {band}: face columns x1 = {x1}, x2 = {x2} (width {x2 - x1})")

# step 6: chin from the 13:9 height/width ratio
y2 = compute_bottom(y1, x1, x2, img.height, params)
print(f"bottom y2 = y1 + round({x2 - x1} * 13/9) = {y2}")

box = segment_face(img, params)
assert box.as_tuple() == (x1, y1, x2, y2)
save_png(render_overlay(img, box), out / "overlay.png")

# the profiles are plain numpy arrays, handy for plotting
print("first rows of the vertical profile:", rows.values[y1 - 3 : y1 + 5].tolist())
print("ground-truth extent:", gt.max_extent.as_tuple(), "detected:", box.as_tuple())
print("wrote", sorted(p.name for p in out.glob("*.png")))
