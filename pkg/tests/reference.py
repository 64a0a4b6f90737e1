"""Brute-force reference implementations used as oracles in tests.

Everything here is written for obviousness, not speed: plain Python loops
that restate the definitions directly. The package implementations are
checked against these on randomized inputs.
"""

from __future__ import annotations

import math

import numpy as np


def naive_dilate(pixels: np.ndarray, side: int) -> np.ndarray:
    """Set a pixel when any foreground pixel sits in its side x side window.

    Out-of-bounds neighbors count as background.
    """
    h, w = pixels.shape
    r = side // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            hit = False
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and pixels[ny, nx]:
                        hit = True
                        break
                if hit:
                    break
            out[y, x] = hit
    return out


def naive_erode(pixels: np.ndarray, side: int) -> np.ndarray:
    """Keep a pixel only when its whole side x side window is foreground.

    Out-of-bounds neighbors count as background, so shapes touching the
    border shrink there too.
    """
    h, w = pixels.shape
    r = side // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            keep = True
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    ny, nx = y + dy, x + dx
                    if not (0 <= ny < h and 0 <= nx < w) or not pixels[ny, nx]:
                        keep = False
                        break
                if not keep:
                    break
            out[y, x] = keep
    return out


def naive_contour_mask(pixels: np.ndarray, side: int) -> np.ndarray:
    """Dilated minus eroded, straight from the definitions above."""
    return naive_dilate(pixels, side) & ~naive_erode(pixels, side)


def circle_overlap_area(radius: float, center_distance: float) -> float:
    """Exact lens area shared by two equal circles (analytic geometry)."""
    r, d = float(radius), float(center_distance)
    if d >= 2.0 * r:
        return 0.0
    if d <= 0.0:
        return math.pi * r * r
    return 2.0 * r * r * math.acos(d / (2.0 * r)) - 0.5 * d * math.sqrt(
        4.0 * r * r - d * d
    )


def rank_percentile(values: list[float], p: float) -> float:
    """Percentile by linear interpolation between closest ranks.

    Rank r = p * (n - 1) + 1 over the sorted sample, 1-based; fractional
    ranks interpolate linearly between the two bracketing observations.
    """
    data = sorted(values)
    n = len(data)
    if n == 0:
        raise ValueError("empty sample")
    if n == 1:
        return float(data[0])
    rank = p / 100.0 * (n - 1)
    lo = int(math.floor(rank))
    hi = min(lo + 1, n - 1)
    frac = rank - lo
    return float(data[lo] + (data[hi] - data[lo]) * frac)
