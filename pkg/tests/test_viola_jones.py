import json

import numpy as np
import pytest

from vhface.cascade import load_shipped_cascade, loads_cascade
from vhface.errors import WindowOutOfBounds
from vhface.imaging import GrayImage
from vhface.integral import integral_image
from vhface.synth import SynthParams, generate_face
from vhface.viola_jones import (
    Detection,
    _scan_scale,
    detect_multiscale,
    evaluate_window,
    group_hits,
    scale_cascade,
)
from vhface.vh import FaceBox

from test_integral_cascade import MINIMAL

LEFT_RIGHT = loads_cascade(json.dumps(MINIMAL))


def left_bright(size=24, high=200, low=0):
    px = np.full((size, size), low, dtype=np.uint8)
    px[:, : size // 2] = high
    return px


def test_left_right_pattern_accepted():
    # value = 200 * 288 / sigma, sigma = 100, so 576 >= 0 -> right = 1 >= 0.5
    ii = integral_image(GrayImage(left_bright()))
    res = evaluate_window(ii, LEFT_RIGHT, (0, 0))
    assert res.accepted and res.score == pytest.approx(0.5)


def test_mirrored_pattern_rejected():
    ii = integral_image(GrayImage(left_bright()[:, ::-1]))
    res = evaluate_window(ii, LEFT_RIGHT, (0, 0))
    assert not res.accepted and res.score == pytest.approx(-1.5)


def test_uniform_window_rejected():
    ii = integral_image(GrayImage(np.full((24, 24), 90)))
    assert not evaluate_window(ii, LEFT_RIGHT, (0, 0)).accepted


def test_window_out_of_bounds():
    ii = integral_image(GrayImage(left_bright()))
    with pytest.raises(WindowOutOfBounds):
        evaluate_window(ii, LEFT_RIGHT, (1, 0))
    with pytest.raises(WindowOutOfBounds):
        evaluate_window(ii, LEFT_RIGHT, (0, 0), scale=1.1)


def test_scaled_rects_stay_balanced():
    sc = scale_cascade(LEFT_RIGHT, 1.3)
    assert sc.window == (31, 31)
    (x0, y0, w0, h0, wt0), (x1, y1, w1, h1, wt1) = sc.stages[0][1][0].rects
    assert wt0 * w0 * h0 == pytest.approx(-wt1 * w1 * h1)
    assert x0 + w0 <= 31 and x1 + w1 <= 31


def test_scaled_window_evaluates_like_base():
    px = left_bright(size=48)
    ii = integral_image(GrayImage(px))
    assert evaluate_window(ii, LEFT_RIGHT, (0, 0), scale=2.0).accepted


def plant(canvas, origin, pattern):
    x, y = origin
    canvas[y : y + pattern.shape[0], x : x + pattern.shape[1]] = pattern


def test_blank_image_no_detections():
    assert detect_multiscale(GrayImage(np.zeros((60, 80))), LEFT_RIGHT) == []


def test_shipped_cascade_finds_one_synthetic_face():
    img, gt = generate_face(SynthParams(seed=5))
    found = detect_multiscale(img, load_shipped_cascade())
    assert len(found) == 1
    assert found[0].box.iou(gt.max_extent) > 0.6


def test_two_planted_faces():
    a, _ = generate_face(SynthParams(width=140, height=200, center=(70, 100), axes=(48, 66), seed=1))
    canvas = np.full((200, 320), 60, dtype=np.uint8)
    plant(canvas, (0, 0), a.pixels)
    plant(canvas, (180, 0), a.pixels)
    found = detect_multiscale(GrayImage(canvas), load_shipped_cascade())
    assert len(found) == 2
    centers = sorted((d.box.x1 + d.box.x2) / 2 for d in found)
    assert centers[0] == pytest.approx(70, abs=6)
    assert centers[1] == pytest.approx(250, abs=6)


def test_planted_face_location():
    patch, gt = generate_face(SynthParams(width=120, height=160, center=(60, 80), axes=(44, 62), seed=2))
    canvas = np.full((240, 320), 60, dtype=np.uint8)
    plant(canvas, (150, 40), patch.pixels)
    (found,) = detect_multiscale(GrayImage(canvas), load_shipped_cascade())
    expected = gt.max_extent.translated(150, 40)
    assert expected.contains(found.box)
    assert found.box.iou(expected) > 0.6


def test_batched_scan_matches_single_window():
    rng = np.random.default_rng(4)
    img, _ = generate_face(SynthParams(seed=9))
    ii = integral_image(img)
    cascade = load_shipped_cascade()
    for scale in (3.0, 4.2):
        sc = scale_cascade(cascade, scale)
        xs, ys, scores = _scan_scale(ii, sc, 2)
        hits = {(x, y): s for x, y, s in zip(xs.tolist(), ys.tolist(), scores.tolist())}
        ww, wh = sc.window
        for x, y in hits:
            res = evaluate_window(ii, sc, (x, y))
            assert res.accepted and res.score == hits[(x, y)]
        for _ in range(300):
            x = int(rng.integers(0, (img.width - ww) // 2 + 1)) * 2
            y = int(rng.integers(0, (img.height - wh) // 2 + 1)) * 2
            assert evaluate_window(ii, sc, (x, y)).accepted == ((x, y) in hits)


def test_grouping():
    hits = [Detection(FaceBox(0, 0, 10, 10), 1.0, 1), Detection(FaceBox(1, 0, 11, 10), 2.0, 1),
            Detection(FaceBox(50, 50, 60, 60), 3.0, 1)]
    out = group_hits(hits, min_neighbors=1)
    assert [d.neighbors for d in out] == [2, 1]
    # per-coordinate mean, rounded half up
    assert out[0].box == FaceBox(1, 0, 11, 10)
    assert out[0].score == 2.0
    assert group_hits(hits, min_neighbors=2) == out[:1]


def test_min_neighbors_superset_and_determinism():
    cascade = load_shipped_cascade()
    for seed in range(4):
        img, _ = generate_face(SynthParams(seed=seed, background_sigma=9.0, face_sigma=9.0))
        one = detect_multiscale(img, cascade, scale_step=1.2, stride=2, min_neighbors=1)
        two = detect_multiscale(img, cascade, scale_step=1.2, stride=2, min_neighbors=2)
        assert set(two) <= set(one)
        assert detect_multiscale(img, cascade, scale_step=1.2, stride=2, min_neighbors=1) == one
