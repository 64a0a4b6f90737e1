"""Image I/O tests: accepted formats, rejections, round trips."""

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from spraycard.errors import ImageReadError
from spraycard.imgio import (
    load_image,
    save_array_png,
    save_gray_pgm,
    save_rgb_png,
    to_uint8,
)
from spraycard.raster import GrayImage, RgbImage


def checkerboard_rgb() -> RgbImage:
    pixels = np.zeros((4, 6, 3), dtype=np.float64)
    pixels[::2, ::2] = (0.2, 0.4, 0.6)
    pixels[1::2, 1::2] = (1.0, 0.8, 0.0)
    return RgbImage(pixels)


class TestLoad:
    def test_rgb_png_round_trip(self, tmp_path):
        image = checkerboard_rgb()
        path = tmp_path / "card.png"
        save_rgb_png(path, image)
        loaded = load_image(path)
        assert isinstance(loaded, RgbImage)
        assert np.array_equal(to_uint8(loaded), to_uint8(image))

    def test_grayscale_png_loads_as_gray(self, tmp_path):
        arr = (np.arange(20, dtype=np.uint8).reshape(4, 5) * 12).clip(0, 255)
        path = tmp_path / "gray.png"
        Image.fromarray(arr, mode="L").save(path, format="PNG")
        loaded = load_image(path)
        assert isinstance(loaded, GrayImage)
        assert np.array_equal(to_uint8(loaded), arr)

    def test_pgm_round_trip(self, tmp_path):
        gray = GrayImage(np.linspace(0, 1, 12).reshape(3, 4))
        path = tmp_path / "card.pgm"
        save_gray_pgm(path, gray)
        loaded = load_image(path)
        assert isinstance(loaded, GrayImage)
        assert np.array_equal(to_uint8(loaded), to_uint8(gray))

    def test_rgba_alpha_is_ignored(self, tmp_path):
        arr = np.zeros((2, 2, 4), dtype=np.uint8)
        arr[..., 0] = 200
        arr[..., 3] = 17
        path = tmp_path / "rgba.png"
        Image.fromarray(arr, mode="RGBA").save(path, format="PNG")
        loaded = load_image(path)
        assert isinstance(loaded, RgbImage)
        assert to_uint8(loaded)[0, 0].tolist() == [200, 0, 0]

    def test_palette_png_is_expanded(self, tmp_path):
        arr = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        im = Image.fromarray(arr, mode="P")
        im.putpalette([10, 20, 30, 200, 210, 220] + [0] * (256 * 3 - 6))
        path = tmp_path / "palette.png"
        im.save(path, format="PNG")
        loaded = load_image(path)
        assert isinstance(loaded, RgbImage)
        assert to_uint8(loaded)[0, 0].tolist() == [10, 20, 30]

    def test_intensities_are_normalized(self, tmp_path):
        image = checkerboard_rgb()
        path = tmp_path / "card.png"
        save_rgb_png(path, image)
        loaded = load_image(path)
        assert loaded.pixels.min() >= 0.0 and loaded.pixels.max() <= 1.0


class TestRejections:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageReadError):
            load_image(tmp_path / "absent.png")

    def test_not_an_image(self, tmp_path):
        path = tmp_path / "noise.png"
        path.write_bytes(b"this is not a png at all")
        with pytest.raises(ImageReadError):
            load_image(path)

    def test_sixteen_bit_png_rejected(self, tmp_path):
        arr = (np.arange(16, dtype=np.uint16).reshape(4, 4) * 4000)
        path = tmp_path / "deep.png"
        Image.fromarray(arr).save(path, format="PNG")
        with pytest.raises(ImageReadError, match="8-bit"):
            load_image(path)

    def test_other_formats_rejected(self, tmp_path):
        arr = np.zeros((4, 4, 3), dtype=np.uint8)
        path = tmp_path / "card.bmp"
        Image.fromarray(arr, mode="RGB").save(path, format="BMP")
        with pytest.raises(ImageReadError, match="format"):
            load_image(path)


class TestSavers:
    def test_save_array_png_validates_shape_and_dtype(self, tmp_path):
        with pytest.raises(ValueError):
            save_array_png(tmp_path / "bad.png", np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(ValueError):
            save_array_png(tmp_path / "bad.png", np.zeros((4, 4, 3), dtype=np.float64))

    def test_to_uint8_rounds_to_nearest_level(self):
        gray = GrayImage(np.array([[0.0, 0.4999 / 255.0, 0.5001 / 255.0, 1.0]]) )
        assert to_uint8(gray).tolist() == [[0, 0, 1, 255]]
