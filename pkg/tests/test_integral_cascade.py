import json

import numpy as np
import pytest

from vhface.cascade import (
    Cascade,
    dumps_cascade,
    load_shipped_cascade,
    loads_cascade,
    parse_cascade,
)
from vhface.errors import ParseError, ValidationError
from vhface.imaging import GrayImage
from vhface.integral import integral_image

from oracles import naive_integral, naive_rect_sum


def test_integral_2x2():
    ii = integral_image(GrayImage([[1, 2], [3, 4]]))
    assert ii.table.tolist() == naive_integral([[1, 2], [3, 4]])
    assert ii.table[1:, 1:].tolist() == [[1, 3], [4, 10]]


def test_integral_zero():
    assert not integral_image(GrayImage(np.zeros((5, 7)))).table.any()


def test_integral_border_and_monotone():
    ii = integral_image(GrayImage(np.random.default_rng(2).integers(0, 256, (30, 40))))
    t = ii.table
    assert t.shape == (31, 41)
    assert not t[0].any() and not t[:, 0].any()
    assert (np.diff(t, axis=0) >= 0).all() and (np.diff(t, axis=1) >= 0).all()


def test_rect_sums_against_naive():
    rng = np.random.default_rng(11)
    for _ in range(100):
        h, w = rng.integers(1, 25, 2)
        px = rng.integers(0, 256, (h, w))
        ii = integral_image(GrayImage(px))
        x1, x2 = sorted(rng.integers(0, w + 1, 2))
        y1, y2 = sorted(rng.integers(0, h + 1, 2))
        assert ii.rect_sum(x1, y1, x2, y2) == naive_rect_sum(px.tolist(), x1, y1, x2, y2)
        assert ii.rect_sq_sum(x1, y1, x2, y2) == naive_rect_sum((px * px).tolist(), x1, y1, x2, y2)


MINIMAL = {
    "base_window": [24, 24],
    "stages": [
        {
            "threshold": 0.5,
            "stumps": [
                {
                    "feature": {
                        "rects": [
                            {"x": 0, "y": 0, "w": 12, "h": 24, "weight": 1},
                            {"x": 12, "y": 0, "w": 12, "h": 24, "weight": -1},
                        ]
                    },
                    "threshold": 0.0,
                    "left": -1.0,
                    "right": 1.0,
                }
            ],
        }
    ],
}


def test_parse_minimal(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(MINIMAL))
    c = parse_cascade(path)
    assert c.base_window == (24, 24)
    (stage,) = c.stages
    assert stage.threshold == 0.5
    (stump,) = stage.stumps
    assert (stump.threshold, stump.left, stump.right) == (0.0, -1.0, 1.0)
    assert [(r.x, r.y, r.w, r.h, r.weight) for r in stump.feature.rects] == [
        (0, 0, 12, 24, 1.0),
        (12, 0, 12, 24, -1.0),
    ]


def test_dump_roundtrip():
    c = loads_cascade(json.dumps(MINIMAL))
    assert loads_cascade(dumps_cascade(c)) == c


def mutate(fn):
    doc = json.loads(json.dumps(MINIMAL))
    fn(doc)
    return json.dumps(doc)


def rect0(doc):
    return doc["stages"][0]["stumps"][0]["feature"]["rects"][0]


@pytest.mark.parametrize(
    "edit",
    [
        lambda d: rect0(d).update(x=12, w=13),
        lambda d: rect0(d).update(x=-1),
        lambda d: d.update(stages=[]),
        lambda d: d["stages"][0].update(stumps=[]),
        lambda d: rect0(d).update(weight=-1),
        lambda d: d["stages"][0]["stumps"][0]["feature"].update(
            rects=[rect0(d)] * 5
        ),
    ],
)
def test_validation_errors(edit):
    with pytest.raises(ValidationError):
        loads_cascade(mutate(edit))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        mutate(lambda d: d.update(extra=1)),
        mutate(lambda d: d.pop("base_window")),
        mutate(lambda d: d["stages"][0].pop("threshold")),
        mutate(lambda d: rect0(d).update(x=1.5)),
        mutate(lambda d: rect0(d).update(weight="1")),
        mutate(lambda d: d.update(base_window=[24])),
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        loads_cascade(text)


def test_shipped_cascade():
    c = load_shipped_cascade()
    assert isinstance(c, Cascade)
    assert len(c.stages) >= 10
