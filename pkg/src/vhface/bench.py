"""Evaluation protocol: landmark-containment success test, SDR and timing.

A detection succeeds when the box holds every annotated landmark box (brows,
both eyes, lips) and does not leave the allowed extent (head plus a bit of
neck).  Results are grouped by detector, spectrum (VIS/TH) and illumination
(AR/IR/NA).
"""

from __future__ import annotations

import json
import math
import os
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .cascade import Cascade
from .errors import EmptyDurations, EmptyResults, ManifestError, VhFaceError
from .imaging import GrayImage, load_image
from .vh import FaceBox, VhParams, segment_face
from .viola_jones import detect_multiscale

__all__ = [
    "SPECTRA",
    "ILLUMINATIONS",
    "LANDMARKS",
    "GroundTruth",
    "ManifestEntry",
    "DatasetManifest",
    "TimingStats",
    "ReportRow",
    "BenchmarkReport",
    "VhDetector",
    "VjDetector",
    "evaluate_detection",
    "sdr",
    "timing_stats",
    "load_ground_truth",
    "save_ground_truth",
    "load_manifest",
    "run_benchmark",
    "format_report",
]

SPECTRA = ("VIS", "TH")
ILLUMINATIONS = ("AR", "IR", "NA")
LANDMARKS = ("brows", "left_eye", "right_eye", "lips")
DETECTOR_LABELS = {"VH": "VH projection", "VJ": "Viola-Jones"}


@dataclass(frozen=True)
class GroundTruth:
    must_include: dict[str, FaceBox]
    max_extent: FaceBox

    def __post_init__(self):
        for name, box in self.must_include.items():
            if not self.max_extent.contains(box):
                raise ValueError(f"landmark {name!r} {box.as_tuple()} leaves max_extent")

    def check_bounds(self, width: int, height: int) -> None:
        if not self.max_extent.fits(width, height):
            raise ValueError(f"max_extent {self.max_extent.as_tuple()} outside {width}x{height}")

    def to_dict(self) -> dict:
        return {
            "must_include": {k: v.as_dict() for k, v in self.must_include.items()},
            "max_extent": self.max_extent.as_dict(),
        }

    @classmethod
    def from_dict(cls, d) -> "GroundTruth":
        return cls(
            {k: FaceBox.from_dict(v) for k, v in d["must_include"].items()},
            FaceBox.from_dict(d["max_extent"]),
        )


def load_ground_truth(path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        return GroundTruth.from_dict(json.load(fh))


def save_ground_truth(gt: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(gt.to_dict(), fh, indent=2)


def evaluate_detection(box: FaceBox | None, gt: GroundTruth) -> bool:
    if box is None:
        return False
    return all(box.contains(lm) for lm in gt.must_include.values()) and gt.max_extent.contains(box)


def sdr(results) -> float:
    """Successful detection rate in percent."""
    results = list(results)
    if not results:
        raise EmptyResults("no detection results")
    return 100.0 * sum(bool(r) for r in results) / len(results)


@dataclass(frozen=True)
class TimingStats:
    total_s: float
    mean_ms: float
    var_ms2: float
    n: int

    def to_dict(self) -> dict:
        return {"total_s": self.total_s, "mean_ms": self.mean_ms, "var_ms2": self.var_ms2, "n": self.n}

    @classmethod
    def from_dict(cls, d) -> "TimingStats":
        return cls(float(d["total_s"]), float(d["mean_ms"]), float(d["var_ms2"]), int(d["n"]))


def timing_stats(durations) -> TimingStats:
    """Summarise per-image durations given in seconds.

    The variance is the sample variance of the durations in milliseconds, so
    its unit is ms^2.
    """
    durations = [float(d) for d in durations]
    if not durations:
        raise EmptyDurations("no durations")
    if any(d <= 0 for d in durations):
        raise ValueError("durations must be positive")
    n = len(durations)
    total = math.fsum(durations)
    var = statistics.variance([d * 1000.0 for d in durations]) if n > 1 else 0.0
    return TimingStats(total, total * 1000.0 / n, var, n)


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class ManifestEntry:
    image: Path
    spectrum: str
    illumination: str
    ground_truth: Path


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def to_json(self, root=None) -> list[dict]:
        def rel(p):
            return os.path.relpath(p, root) if root is not None else os.fspath(p)

        return [
            {
                "image": rel(e.image),
                "spectrum": e.spectrum,
                "illumination": e.illumination,
                "ground_truth": rel(e.ground_truth),
            }
            for e in self.entries
        ]


def _entry(raw, root: Path, index: int) -> ManifestEntry:
    if not isinstance(raw, dict):
        raise ManifestError(f"entry {index} is not an object")
    try:
        image, spectrum, illum, gt = (
            raw["image"], raw["spectrum"], raw["illumination"], raw["ground_truth"]
        )
    except KeyError as exc:
        raise ManifestError(f"entry {index} lacks key {exc}") from None
    spectrum, illum = str(spectrum).upper(), str(illum).upper()
    if spectrum not in SPECTRA:
        raise ManifestError(f"entry {index}: unknown spectrum {spectrum!r}")
    if illum not in ILLUMINATIONS:
        raise ManifestError(f"entry {index}: unknown illumination {illum!r}")
    image_path, gt_path = root / image, root / gt
    for p in (image_path, gt_path):
        if not p.is_file():
            raise ManifestError(f"entry {index}: cannot resolve {p}")
    return ManifestEntry(image_path, spectrum, illum, gt_path)


def load_manifest(path) -> DatasetManifest:
    """Read a JSON manifest; relative paths resolve against its directory."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ManifestError(f"manifest {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path}: {exc}") from None
    if not isinstance(doc, list):
        raise ManifestError("manifest must be a JSON array")
    return DatasetManifest(tuple(_entry(raw, path.parent, i) for i, raw in enumerate(doc)))


# ---------------------------------------------------------------------------
# detectors


class Detector(Protocol):
    name: str

    def detect(self, img: GrayImage) -> FaceBox | None: ...


@dataclass(frozen=True)
class VhDetector:
    params: VhParams = VhParams()
    name: str = "VH"

    def detect(self, img: GrayImage) -> FaceBox | None:
        return segment_face(img, self.params)


@dataclass(frozen=True)
class VjDetector:
    """Scores only the strongest detection (most neighbours, then score)."""

    cascade: Cascade
    scale_step: float = 1.1
    stride: int = 1
    min_neighbors: int = 3
    name: str = "VJ"

    def detect(self, img: GrayImage) -> FaceBox | None:
        found = detect_multiscale(img, self.cascade, self.scale_step, self.stride, self.min_neighbors)
        return found[0].box if found else None


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ReportRow:
    detector: str
    spectrum: str
    illumination: str
    sdr_percent: float
    timing: TimingStats
    n_images: int

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.detector, self.spectrum, self.illumination)

    def to_dict(self) -> dict:
        return {
            "detector": self.detector,
            "spectrum": self.spectrum,
            "illumination": self.illumination,
            "sdr_percent": self.sdr_percent,
            "n_images": self.n_images,
            "timing": self.timing.to_dict(),
        }

    @classmethod
    def from_dict(cls, d) -> "ReportRow":
        return cls(
            d["detector"], d["spectrum"], d["illumination"], float(d["sdr_percent"]),
            TimingStats.from_dict(d["timing"]), int(d["n_images"]),
        )


def _order(key):
    det, spec, illum = key
    dets = list(DETECTOR_LABELS)
    return (
        dets.index(det) if det in dets else len(dets), det,
        SPECTRA.index(spec), ILLUMINATIONS.index(illum),
    )


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[ReportRow, ...]
    details: tuple[dict, ...] = field(default=(), compare=False)

    def row(self, detector: str, spectrum: str, illumination: str) -> ReportRow | None:
        for r in self.rows:
            if r.key == (detector, spectrum, illumination):
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "variance_unit": "ms^2",
            "rows": [r.to_dict() for r in self.rows],
            "images": list(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d) -> "BenchmarkReport":
        return cls(tuple(ReportRow.from_dict(r) for r in d["rows"]), tuple(d.get("images", ())))

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkReport":
        return cls.from_dict(json.loads(text))


def run_benchmark(manifest: DatasetManifest, detectors) -> BenchmarkReport:
    """Run every detector on every manifest image.

    Only the detector call is timed; loading happens before the clock starts.
    A detector error on an image is scored as a failed detection.
    """
    if not manifest.entries:
        raise ManifestError("manifest is empty")
    detectors = list(detectors)
    if not detectors:
        raise ValueError("no detectors given")

    outcomes: dict[tuple[str, str, str], list[tuple[bool, float]]] = {}
    details = []
    for entry in manifest.entries:
        try:
            img = load_image(entry.image)
            gt = load_ground_truth(entry.ground_truth)
        except (OSError, VhFaceError, ValueError, KeyError) as exc:
            raise ManifestError(f"{entry.image}: {exc}") from exc
        for det in detectors:
            error = None
            start = time.perf_counter()
            try:
                box = det.detect(img)
            except VhFaceError as exc:
                box, error = None, type(exc).__name__
            elapsed = time.perf_counter() - start
            ok = evaluate_detection(box, gt)
            outcomes.setdefault((det.name, entry.spectrum, entry.illumination), []).append(
                (ok, max(elapsed, 1e-9))
            )
            details.append({
                "image": os.fspath(entry.image),
                "detector": det.name,
                "box": box.as_dict() if box is not None else None,
                "success": ok,
                "error": error,
                "duration_s": elapsed,
            })

    rows = []
    for key in sorted(outcomes, key=_order):
        results = outcomes[key]
        rows.append(ReportRow(
            *key,
            sdr_percent=sdr(ok for ok, _ in results),
            timing=timing_stats(d for _, d in results),
            n_images=len(results),
        ))
    return BenchmarkReport(tuple(rows), tuple(details))


def format_report(report: BenchmarkReport) -> str:
    """Aligned text tables: SDR by spectrum x detector x illumination, then
    one timing table per illumination."""
    dets = sorted({r.detector for r in report.rows}, key=lambda d: _order((d, "VIS", "AR")))
    label_w = max(len(DETECTOR_LABELS.get(d, d)) for d in dets) + 6
    lines = ["Successful detection rates [%]", " " * label_w + "".join(f"{i:>9}" for i in ILLUMINATIONS)]
    for spec in SPECTRA:
        first = True
        for det in dets:
            if not any(report.row(det, spec, i) for i in ILLUMINATIONS):
                continue
            cells = []
            for illum in ILLUMINATIONS:
                row = report.row(det, spec, illum)
                cells.append(f"{row.sdr_percent:>9.1f}" if row else f"{'-':>9}")
            head = f"{spec if first else '':<5}{DETECTOR_LABELS.get(det, det)}"
            lines.append(f"{head:<{label_w}}" + "".join(cells))
            first = False

    for illum in ILLUMINATIONS:
        present = [r for r in report.rows if r.illumination == illum]
        if not present:
            continue
        lines += ["", f"Detection time, illumination {illum}",
                  " " * label_w + f"{'n':>6}{'d [s]':>12}{'mean(d) [ms]':>15}{'var(d) [ms^2]':>16}"]
        for spec in SPECTRA:
            first = True
            for det in dets:
                row = report.row(det, spec, illum)
                if row is None:
                    continue
                t = row.timing
                head = f"{spec if first else '':<5}{DETECTOR_LABELS.get(det, det)}"
                lines.append(
                    f"{head:<{label_w}}{t.n:>6}{t.total_s:>12.3f}{t.mean_ms:>15.3f}{t.var_ms2:>16.3f}"
                )
                first = False
    return "\n".join(lines) + "\n"
