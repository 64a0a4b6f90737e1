"""Pixel-level transforms that prepare a card image for segmentation.

The front half of the measurement pipeline is four deterministic raster
steps: luminance grayscale conversion, fixed-threshold binarization, and
one round of dilation and erosion over distinct copies whose set
difference yields a ring-shaped mask around every stain. All images are
immutable value types holding float or boolean pixel grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default binarization threshold on the [0, 1] intensity scale (90/255).
DEFAULT_THRESHOLD = 0.35

_R_WEIGHT = 0.299
_G_WEIGHT = 0.587
_B_WEIGHT = 0.114


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RgbImage:
    """Color card image, shape (height, width, 3), intensities in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.pixels, np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class GrayImage:
    """Single-channel intensity image with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.pixels, np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected (H, W) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class BinaryImage:
    """Boolean mask where True marks stain (foreground) pixels."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.dtype != np.bool_:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("binary pixels must be boolean or 0/1 valued")
            arr = arr.astype(bool)
        arr = _frozen_array(arr, np.bool_)
        if arr.ndim != 2:
            raise ValueError(f"expected (H, W) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class StructuringElement:
    """Square all-ones neighborhood of odd side length used by morphology."""

    side: int = 3

    def __post_init__(self) -> None:
        if self.side < 1 or self.side % 2 == 0:
            raise ValueError("structuring element side must be odd and >= 1")

    @property
    def radius(self) -> int:
        return self.side // 2


def to_grayscale(image: RgbImage) -> GrayImage:
    """Collapse RGB to luminance: 0.299 R + 0.587 G + 0.114 B.

    The weights sum to one, so a gray input (equal channels) is a fixed
    point of the conversion.
    """
    rgb = image.pixels
    gray = _R_WEIGHT * rgb[..., 0] + _G_WEIGHT * rgb[..., 1] + _B_WEIGHT * rgb[..., 2]
    # Weights sum to 1 exactly in decimal but not in binary; clamp the ulp.
    np.clip(gray, 0.0, 1.0, out=gray)
    return GrayImage(gray)


def binarize(image: GrayImage, threshold: float = DEFAULT_THRESHOLD) -> BinaryImage:
    """Mark pixels strictly darker than the threshold as stain.

    Stains are dark on a light card, so foreground is gray < threshold;
    a pixel exactly at the threshold is background.
    """
    t = float(threshold)
    if not 0.0 < t < 1.0:
        raise ValueError(f"threshold must lie strictly inside (0, 1), got {t}")
    return BinaryImage(image.pixels < t)


def _shifted(pixels: np.ndarray, offset: int, axis: int) -> np.ndarray:
    """Copy of a boolean grid shifted along one axis, vacated cells False."""
    out = np.zeros_like(pixels)
    src = [slice(None), slice(None)]
    dst = [slice(None), slice(None)]
    if offset > 0:
        dst[axis] = slice(offset, None)
        src[axis] = slice(None, -offset)
    else:
        dst[axis] = slice(None, offset)
        src[axis] = slice(-offset, None)
    out[tuple(dst)] = pixels[tuple(src)]
    return out


def _axis_sweep(pixels: np.ndarray, radius: int, axis: int, union: bool) -> np.ndarray:
    acc = pixels.copy()
    for offset in range(1, radius + 1):
        fwd = _shifted(pixels, offset, axis)
        bwd = _shifted(pixels, -offset, axis)
        if union:
            acc |= fwd
            acc |= bwd
        else:
            acc &= fwd
            acc &= bwd
    return acc


def dilate(image: BinaryImage, se: StructuringElement = StructuringElement()) -> BinaryImage:
    """Grow foreground by the structuring element, one iteration.

    A pixel turns on when any foreground pixel falls inside its window.
    The square window separates into a row sweep then a column sweep,
    so cost is linear in the element side rather than its area.
    Out-of-bounds neighbors are background.
    """
    if se.radius == 0:
        return BinaryImage(image.pixels)
    rows = _axis_sweep(image.pixels, se.radius, 0, union=True)
    return BinaryImage(_axis_sweep(rows, se.radius, 1, union=True))


def erode(image: BinaryImage, se: StructuringElement = StructuringElement()) -> BinaryImage:
    """Shrink foreground by the structuring element, one iteration.

    A pixel survives only when its whole window is foreground. Vacated
    cells introduced by the shifts are False, so out-of-bounds counts as
    background and shapes touching the border shrink there too.
    """
    if se.radius == 0:
        return BinaryImage(image.pixels)
    rows = _axis_sweep(image.pixels, se.radius, 0, union=False)
    return BinaryImage(_axis_sweep(rows, se.radius, 1, union=False))


def contour_mask(dilated: BinaryImage, eroded: BinaryImage) -> BinaryImage:
    """Pixels in the dilated image but not the eroded one: a ring per stain."""
    if dilated.pixels.shape != eroded.pixels.shape:
        raise ValueError(
            f"dimension mismatch: {dilated.pixels.shape} vs {eroded.pixels.shape}"
        )
    return BinaryImage(dilated.pixels & ~eroded.pixels)
