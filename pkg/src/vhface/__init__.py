"""Face segmentation by vertical/horizontal projection, with a Viola-Jones
baseline and a detection benchmark harness."""

from .imaging import (
    BinaryImage,
    GrayImage,
    Histogram,
    binarize,
    histogram,
    load_image,
    otsu_threshold,
    save_pgm,
    save_png,
)
from .vh import FaceBox, ProjectionProfile, VhParams, segment_face

__version__ = "0.1.0"

__all__ = [
    "BinaryImage",
    "GrayImage",
    "Histogram",
    "binarize",
    "histogram",
    "load_image",
    "otsu_threshold",
    "save_pgm",
    "save_png",
    "FaceBox",
    "ProjectionProfile",
    "VhParams",
    "segment_face",
]
