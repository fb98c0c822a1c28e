"""Exception hierarchy shared by all pipeline stages."""


class GeoPhysioError(Exception):
    """Base class for every error raised by this package."""


class FormatError(GeoPhysioError):
    """A file or document does not follow its declared structure."""


class InvalidValueError(GeoPhysioError):
    """A field holds a value outside its allowed range (non-finite, out of bounds...)."""


class OrderError(GeoPhysioError):
    """Timestamps or offsets are not strictly increasing."""


class MissingReferenceError(GeoPhysioError):
    """A manifest points at a file or segment id that does not exist."""


class InsufficientDataError(GeoPhysioError):
    """Too few samples/beats (or too short a span) for the requested computation."""


class DegenerateDataError(GeoPhysioError):
    """The computation is undefined on this input (zero variance, zero band power...)."""
