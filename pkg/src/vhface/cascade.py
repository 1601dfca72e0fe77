"""Haar cascade model and its JSON file format.

Layout of a cascade file::

    {"base_window": [24, 24],
     "stages": [{"threshold": 0.5,
                 "stumps": [{"feature": {"rects": [{"x": 0, "y": 0, "w": 12, "h": 24, "weight": 1}, ...]},
                             "threshold": 0.0, "left": -1.0, "right": 1.0}]}]}

Rect coordinates are in base-window pixels.  A stump outputs ``left`` when
the normalized feature value is below its threshold and ``right`` otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .errors import ParseError, ValidationError

__all__ = [
    "Rect",
    "HaarFeature",
    "Stump",
    "Stage",
    "Cascade",
    "parse_cascade",
    "loads_cascade",
    "dumps_cascade",
    "shipped_cascade_path",
    "load_shipped_cascade",
]

_TOP_KEYS = {"base_window", "stages"}


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int
    weight: float

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class HaarFeature:
    rects: tuple[Rect, ...]

    def validate(self, base_window: tuple[int, int]) -> None:
        bw, bh = base_window
        if not 2 <= len(self.rects) <= 4:
            raise ValidationError(f"feature needs 2-4 rects, got {len(self.rects)}")
        for r in self.rects:
            if r.w < 1 or r.h < 1 or r.x < 0 or r.y < 0 or r.x + r.w > bw or r.y + r.h > bh:
                raise ValidationError(f"rect {r} outside base window {bw}x{bh}")
            if not math.isfinite(r.weight):
                raise ValidationError(f"non-finite weight in {r}")
        if not any(r.weight > 0 for r in self.rects) or not any(r.weight < 0 for r in self.rects):
            raise ValidationError("feature weights must include both signs")


@dataclass(frozen=True)
class Stump:
    feature: HaarFeature
    threshold: float
    left: float
    right: float


@dataclass(frozen=True)
class Stage:
    threshold: float
    stumps: tuple[Stump, ...]


@dataclass(frozen=True)
class Cascade:
    base_window: tuple[int, int]
    stages: tuple[Stage, ...]

    def __post_init__(self):
        object.__setattr__(self, "base_window", tuple(self.base_window))
        object.__setattr__(self, "stages", tuple(self.stages))
        self.validate()

    def validate(self) -> None:
        bw, bh = self.base_window
        if bw < 1 or bh < 1:
            raise ValidationError(f"bad base window {self.base_window}")
        if not self.stages:
            raise ValidationError("cascade has no stages")
        for i, stage in enumerate(self.stages):
            if not stage.stumps:
                raise ValidationError(f"stage {i} has no stumps")
            for stump in stage.stumps:
                stump.feature.validate(self.base_window)

    def without_stage(self, index: int) -> "Cascade":
        stages = self.stages[:index] + self.stages[index + 1 :]
        return Cascade(self.base_window, stages)

    def to_dict(self) -> dict:
        return {
            "base_window": list(self.base_window),
            "stages": [
                {
                    "threshold": st.threshold,
                    "stumps": [
                        {
                            "feature": {
                                "rects": [
                                    {"x": r.x, "y": r.y, "w": r.w, "h": r.h, "weight": r.weight}
                                    for r in sp.feature.rects
                                ]
                            },
                            "threshold": sp.threshold,
                            "left": sp.left,
                            "right": sp.right,
                        }
                        for sp in st.stumps
                    ],
                }
                for st in self.stages
            ],
        }


def _number(obj, key, where):
    try:
        value = obj[key]
    except (KeyError, TypeError):
        raise ParseError(f"{where}: missing {key!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: {key!r} must be a number, got {value!r}")
    return value


def _integer(obj, key, where):
    value = _number(obj, key, where)
    if isinstance(value, float):
        if not value.is_integer():
            raise ParseError(f"{where}: {key!r} must be an integer, got {value!r}")
        value = int(value)
    return value


def _list(obj, key, where):
    try:
        value = obj[key]
    except (KeyError, TypeError):
        raise ParseError(f"{where}: missing {key!r}") from None
    if not isinstance(value, list):
        raise ParseError(f"{where}: {key!r} must be a list")
    return value


def _from_dict(doc) -> Cascade:
    if not isinstance(doc, dict):
        raise ParseError("cascade document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ParseError(f"unknown top-level keys: {sorted(unknown)}")
    window = _list(doc, "base_window", "cascade")
    if len(window) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in window):
        raise ParseError(f"base_window must be two integers, got {window!r}")

    stages = []
    for i, st in enumerate(_list(doc, "stages", "cascade")):
        where = f"stage {i}"
        stumps = []
        for j, sp in enumerate(_list(st, "stumps", where)):
            swhere = f"{where} stump {j}"
            feat = sp.get("feature") if isinstance(sp, dict) else None
            rects = tuple(
                Rect(
                    _integer(r, "x", swhere),
                    _integer(r, "y", swhere),
                    _integer(r, "w", swhere),
                    _integer(r, "h", swhere),
                    float(_number(r, "weight", swhere)),
                )
                for r in _list(feat, "rects", swhere)
            )
            stumps.append(
                Stump(
                    HaarFeature(rects),
                    float(_number(sp, "threshold", swhere)),
                    float(_number(sp, "left", swhere)),
                    float(_number(sp, "right", swhere)),
                )
            )
        stages.append(Stage(float(_number(st, "threshold", where)), tuple(stumps)))
    return Cascade(tuple(window), tuple(stages))


def loads_cascade(text: str) -> Cascade:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return _from_dict(doc)


def parse_cascade(path) -> Cascade:
    with open(path, encoding="utf-8") as fh:
        return loads_cascade(fh.read())


def dumps_cascade(cascade: Cascade) -> str:
    return json.dumps(cascade.to_dict(), indent=1)


def shipped_cascade_path():
    """Path to the bundled hand-built cascade for the synthetic face images."""
    return resources.files("vhface") / "data" / "synthetic_face_cascade.json"


def load_shipped_cascade() -> Cascade:
    return loads_cascade(shipped_cascade_path().read_text(encoding="utf-8"))
