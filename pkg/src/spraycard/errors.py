"""Exception types shared across the package."""


class SprayCardError(Exception):
    """Base class for errors raised by this package."""


class ImageReadError(SprayCardError):
    """The input file could not be read or decoded as a supported image."""


class DistortedCaptureError(SprayCardError):
    """Card and image aspect ratios disagree beyond the allowed tolerance."""


class CardGeometryError(SprayCardError):
    """A synthetic layout is invalid, e.g. a drop crosses the card edge."""
