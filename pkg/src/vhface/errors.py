"""Exception hierarchy shared by every module of the package."""


class VhFaceError(Exception):
    """Base class for all errors raised by vhface."""


# image I/O
class UnsupportedFormat(VhFaceError):
    pass


class CorruptFile(VhFaceError):
    pass


class EmptyHistogram(VhFaceError):
    pass


# VH projection detector
class NoFaceFound(VhFaceError):
    pass


class DegenerateWidth(VhFaceError):
    pass


class DegenerateBox(VhFaceError):
    pass


class InvalidRange(VhFaceError, ValueError):
    pass


# Viola-Jones baseline
class ParseError(VhFaceError):
    pass


class ValidationError(VhFaceError):
    pass


class WindowOutOfBounds(VhFaceError):
    pass


# benchmark harness
class EmptyResults(VhFaceError, ValueError):
    pass


class EmptyDurations(VhFaceError, ValueError):
    pass


class ManifestError(VhFaceError):
    pass


# synthetic data / overlay
class InvalidParams(VhFaceError, ValueError):
    pass


class BoxOutOfBounds(VhFaceError, ValueError):
    pass
