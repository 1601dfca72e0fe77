"""Run the Viola-Jones baseline with the bundled hand-made cascade.

    python demos/02_viola_jones_baseline.py

Unlike the VH detector it can return several faces per image.
"""

import time

import numpy as np

from vhface.cascade import load_shipped_cascade
from vhface.imaging import GrayImage
from vhface.integral import integral_image
from vhface.synth import SynthParams, generate_face
from vhface.vh import segment_face
from vhface.viola_jones import detect_multiscale, evaluate_window

cascade = load_shipped_cascade()
print(f"cascade: {len(cascade.stages)} stages, base window {cascade.base_window}")

img, gt = generate_face(SynthParams(seed=1))

# rectangle sums in four lookups
ii = integral_image(img)
x1, y1, x2, y2 = gt.max_extent.as_tuple()
print("face region mean:", ii.rect_sum(x1, y1, x2, y2) / gt.max_extent.area)

# a single window: the cascade stops at the first stage that rejects
for origin in [(0, 0), (120, 60)]:
    res = evaluate_window(ii, cascade, origin, scale=4.4)
    print(f"window at {origin}: accepted={res.accepted}, stages passed={res.stages_passed}")

start = time.perf_counter()
found = detect_multiscale(img, cascade)
vj_ms = 1000 * (time.perf_counter() - start)
start = time.perf_counter()
box = segment_face(img)
vh_ms = 1000 * (time.perf_counter() - start)
for d in found:
    print(f"VJ: {d.box.as_tuple()} neighbors={d.neighbors}")
print(f"VH: {box.as_tuple()}")
print(f"VJ {vj_ms:.1f} ms vs VH {vh_ms:.2f} ms")

# two faces side by side: VJ sees both, VH by construction returns one box
face, _ = generate_face(SynthParams(width=140, height=200, center=(70, 100), seed=2))
canvas = np.full((200, 320), 60, dtype=np.uint8)
canvas[:, :140] = face.pixels
canvas[:, 180:] = face.pixels
pair = GrayImage(canvas)
print("two faces -> VJ boxes:", [d.box.as_tuple() for d in detect_multiscale(pair, cascade)])
print("two faces -> VH box:  ", segment_face(pair).as_tuple())
