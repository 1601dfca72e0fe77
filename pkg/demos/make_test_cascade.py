"""Build the bundled hand-made cascade for the synthetic face images.

Nothing is learned.  Every feature is picked by hand against an ideal
two-level template: a face ellipse slightly wider and taller than the 20x28
window, so that the window corners fall on background.  Because features are
divided by the window standard deviation, a feature's value on that template
does not depend on the face/background contrast, and the stump threshold is
simply half of it.

Run from the repository root::

    python demos/make_test_cascade.py src/vhface/data/synthetic_face_cascade.json
"""

import sys

import numpy as np

from vhface.cascade import Cascade, HaarFeature, Rect, Stage, Stump, dumps_cascade
from vhface.imaging import GrayImage
from vhface.integral import integral_image
from vhface.viola_jones import scale_cascade

W, H = 20, 28
CX, CY, A, B = 10.0, 13.5, 11.0, 14.5


def template():
    ys, xs = np.mgrid[0:H, 0:W] + 0.5
    face = ((xs - CX) / A) ** 2 + ((ys - CY) / B) ** 2 <= 1.0
    return GrayImage(np.where(face, 1, 0).astype(np.uint8))


def feature(*rects):
    return HaarFeature(tuple(Rect(*r) for r in rects))


# balanced features whose value is positive on the template
FEATURES = [
    feature((0, 0, 3, 3, -1), (0, 9, 3, 3, 1)),      # top-left corner is background
    feature((17, 0, 3, 3, -1), (17, 9, 3, 3, 1)),    # top-right corner
    feature((0, 25, 3, 3, -1), (0, 16, 3, 3, 1)),    # bottom-left corner
    feature((17, 25, 3, 3, -1), (17, 16, 3, 3, 1)),  # bottom-right corner
    feature((0, 0, 4, 2, -1), (16, 0, 4, 2, -1), (6, 0, 8, 2, 1)),      # crown
    feature((0, 26, 4, 2, -1), (16, 26, 4, 2, -1), (6, 26, 8, 2, 1)),   # chin
    feature((0, 0, 3, 3, -1), (17, 0, 3, 3, -1), (7, 9, 6, 3, 2)),      # top corners vs centre
    feature((0, 25, 3, 3, -1), (17, 25, 3, 3, -1), (7, 16, 6, 3, 2)),   # bottom corners vs centre
    feature((0, 0, 2, 6, -1), (3, 8, 2, 6, 1)),      # left temple
    feature((18, 0, 2, 6, -1), (15, 8, 2, 6, 1)),    # right temple
]
# near zero on the template; a two-sided test rejects lopsided windows
SYMMETRIC = [
    feature((0, 0, 10, 28, 1), (10, 0, 10, 28, -1)),
    feature((0, 0, 20, 4, 1), (0, 24, 20, 4, -1)),
]
SYM_BAND = 0.25  # fraction of the half-window area, in template units


def template_values(feats):
    ii = integral_image(template())
    probe = Cascade((W, H), (Stage(0.0, tuple(Stump(f, 0.0, 0.0, 1.0) for f in feats)),))
    sc = scale_cascade(probe, 1.0)
    n = W * H
    s = ii.rect_sum(0, 0, W, H)
    sigma = np.sqrt(n * ii.rect_sq_sum(0, 0, W, H) - s * s) / n
    out = []
    for stump in sc.stages[0][1]:
        value = sum(wt * ii.rect_sum(x, y, x + w, y + h) for x, y, w, h, wt in stump.rects)
        out.append(value / sigma)
    return out, sigma


def build():
    values, sigma = template_values(FEATURES)
    stages = []
    for f, v in zip(FEATURES, values):
        assert v > 0, (f, v)
        stages.append(Stage(0.5, (Stump(f, round(0.5 * v, 3), 0.0, 1.0),)))
    band = round(SYM_BAND * (W * H / 2) / sigma, 3)
    for f in SYMMETRIC:
        stages.append(Stage(1.5, (Stump(f, -band, 0.0, 1.0), Stump(f, band, 1.0, 0.0))))
    return Cascade((W, H), tuple(stages))


if __name__ == "__main__":
    text = dumps_cascade(build())
    if len(sys.argv) > 1:
        with open(sys.argv[1], "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
