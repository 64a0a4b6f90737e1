"""Reading and writing the card image formats the tool accepts.

Supported inputs are 8-bit PNG (color or grayscale, alpha ignored) and
8-bit PGM. Grayscale sources come back as GrayImage so the pipeline can
skip its color conversion step. All intensities are normalized to the
[0, 1] range on load.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageReadError
from .raster import GrayImage, RgbImage

_GRAY_MODES = {"L", "1"}
_COLOR_MODES = {"RGB", "RGBA", "LA", "P"}


def load_image(path: str | Path) -> RgbImage | GrayImage:
    """Decode a card image file into the matching image type.

    Raises ImageReadError for missing files, undecodable data, formats
    other than PNG/PGM, and bit depths other than 8.
    """
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in ("PNG", "PPM"):
                raise ImageReadError(
                    f"{path}: unsupported format {fmt or 'unknown'}; expected PNG or PGM"
                )
            mode = im.mode
            if mode in ("I", "I;16", "I;16B", "I;16L", "F"):
                raise ImageReadError(f"{path}: only 8-bit images are supported")
            if mode in _GRAY_MODES:
                arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
                return GrayImage(arr)
            if mode not in _COLOR_MODES:
                raise ImageReadError(f"{path}: unsupported pixel mode {mode}")
            rgb = np.asarray(im.convert("RGBA"), dtype=np.float64)[:, :, :3] / 255.0
            return RgbImage(rgb)
    except UnidentifiedImageError as exc:
        raise ImageReadError(f"{path}: not a decodable image") from exc
    except OSError as exc:
        raise ImageReadError(f"{path}: {exc}") from exc


def to_uint8(image: RgbImage | GrayImage) -> np.ndarray:
    """Pixels as 8-bit samples, rounding to the nearest level."""
    return np.round(image.pixels * 255.0).astype(np.uint8)


def save_rgb_png(path: str | Path, image: RgbImage) -> None:
    """Write an RgbImage as an 8-bit RGB PNG."""
    Image.fromarray(to_uint8(image), mode="RGB").save(path, format="PNG")


def save_array_png(path: str | Path, pixels: np.ndarray) -> None:
    """Write a (H, W, 3) uint8 array as a PNG; used for overlays."""
    if pixels.dtype != np.uint8 or pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ValueError("expected (H, W, 3) uint8 pixels")
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG")


def save_gray_pgm(path: str | Path, image: GrayImage) -> None:
    """Write a GrayImage as an 8-bit binary PGM."""
    Image.fromarray(to_uint8(image), mode="L").save(path, format="PPM")
