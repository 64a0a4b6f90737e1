"""Stain segmentation: ring extraction and marker-driven flooding.

The ring mask from the raster stage is split into connected components,
one per stain, and each component seeds a priority flood over the
grayscale image. Seeds compete with an explicit background marker in
ascending intensity order, so every segment ends up covering exactly the
dark pixels that drain to its ring and measured areas track the true
stain footprint rather than its dilated envelope. Intensity ties resolve
to the background marker first and queue arrival after that, which makes
the whole process deterministic down to the last pixel.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .raster import BinaryImage, GrayImage

# Label map sentinels. Ridge pixels separate two segments that met during
# flooding and belong to neither.
RIDGE = -1
_UNSET = -2
_WALL = -3

_NEIGHBORS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Contour:
    """One 8-connected component of the ring mask.

    pixels holds (row, col) coordinates, raster ordered; bbox is
    (x_min, y_min, x_max, y_max) inclusive in pixel coordinates.
    """

    label: int
    pixels: np.ndarray
    bbox: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.int32, copy=True)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise ValueError("contour pixels must be a non-empty (n, 2) array")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)
        if self.label < 1:
            raise ValueError("contour labels start at 1")


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel segment assignment: 0 background, k >= 1 segments, -1 ridge."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.labels, dtype=np.int32, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected (H, W) labels, got shape {arr.shape}")
        if arr.min() < RIDGE:
            raise ValueError("labels must be >= -1")
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def segment_labels(self) -> list[int]:
        """Sorted positive labels present in the map."""
        values = np.unique(self.labels)
        return [int(v) for v in values if v > 0]


@dataclass(frozen=True)
class DropSegment:
    """One measured stain: pixel area plus location summaries."""

    label: int
    area_px: int
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]
    width_px: int
    height_px: int


def find_contours(mask: BinaryImage) -> list[Contour]:
    """Label the 8-connected components of a binary mask.

    Components are numbered 1..K by the raster-scan position of their
    first pixel, so the result is reproducible across runs. Pixel lists
    come back raster ordered.
    """
    pixels = mask.pixels
    h, w = pixels.shape
    labels = np.zeros((h, w), dtype=np.int32)
    contours: list[Contour] = []
    label = 0
    for sy, sx in np.argwhere(pixels).tolist():
        if labels[sy, sx]:
            continue
        label += 1
        labels[sy, sx] = label
        queue = deque(((sy, sx),))
        component = []
        while queue:
            y, x = queue.popleft()
            component.append((y, x))
            for dy, dx in _NEIGHBORS_8:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and pixels[ny, nx] and not labels[ny, nx]:
                    labels[ny, nx] = label
                    queue.append((ny, nx))
        arr = np.array(component, dtype=np.int32)
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        arr = arr[order]
        bbox = (
            int(arr[:, 1].min()),
            int(arr[:, 0].min()),
            int(arr[:, 1].max()),
            int(arr[:, 0].max()),
        )
        contours.append(Contour(label=label, pixels=arr, bbox=bbox))
    return contours


def _outside_mask(contours: Sequence[Contour], shape: tuple[int, int]) -> np.ndarray:
    """Pixels not enclosed by any ring: the implicit background marker."""
    ring = np.zeros(shape, dtype=bool)
    for contour in contours:
        ring[contour.pixels[:, 0], contour.pixels[:, 1]] = True
    return ~ndimage.binary_fill_holes(ring)


def watershed(
    gray: GrayImage,
    contours: Sequence[Contour],
    background: BinaryImage | None = None,
) -> LabelMap:
    """Flood the grayscale image from ring seeds and a background marker.

    Parameters
    ----------
    gray : GrayImage
        Intensity surface the flood climbs; stains are its dark basins.
    contours : sequence of Contour
        Ring components whose pixels enter the flood queue carrying the
        ring's label and their own intensity.
    background : BinaryImage, optional
        Marker for pixels known to lie outside every stain. The pipeline
        passes the complement of the dilated mask; when omitted, pixels
        not enclosed by any ring are used.

    The background marker is assigned label 0 up front and its frontier
    is queued first; ring pixels are queued after, contour by contour.
    Pixels leave the queue in ascending (intensity, marker rank, arrival)
    order and adopt the label that queued them: darker pixels first, the
    background marker ahead of stain labels at equal intensity, queue
    arrival last. Dark stain interiors therefore drain to their ring
    while every bright halo pixel the dilation added falls back to the
    background, keeping measured areas aligned with the thresholded
    stain footprint. A pixel reached while a different positive label
    already touches it becomes a ridge and separates the two segments.
    Flood moves by 4-adjacency.

    The output is a total assignment: every pixel is background, ridge,
    or exactly one segment. Equal inputs produce bit-identical maps.
    """
    surface = gray.pixels
    h, w = surface.shape
    for contour in contours:
        rows = contour.pixels[:, 0]
        cols = contour.pixels[:, 1]
        if rows.max() >= h or cols.max() >= w:
            raise ValueError(
                f"contour {contour.label} exceeds image bounds {(h, w)}"
            )
    if background is not None:
        if background.pixels.shape != (h, w):
            raise ValueError(
                f"dimension mismatch: gray {(h, w)} vs background {background.pixels.shape}"
            )
        outside = background.pixels
    else:
        outside = _outside_mask(contours, (h, w))

    # Work on padded flat arrays: the sentinel border removes all bounds
    # checks from the hot loop.
    wp = w + 2
    padded = np.full((h + 2, wp), _UNSET, dtype=np.int32)
    padded[0, :] = padded[-1, :] = _WALL
    padded[:, 0] = padded[:, -1] = _WALL
    inner = padded[1:-1, 1:-1]
    inner[outside] = 0

    gray_padded = np.ones((h + 2, wp), dtype=np.float64)
    gray_padded[1:-1, 1:-1] = surface

    labels_flat = padded.ravel()
    gray_flat = gray_padded.ravel()

    # Heap entries are (intensity, marker rank, arrival, pixel, label).
    # Rank 0 for background proposals, 1 for stain labels: the background
    # wins intensity ties no matter when its wave reaches the pixel.
    heap: list[tuple[float, int, int, int, int]] = []
    push = heapq.heappush
    pop = heapq.heappop
    arrival = 0

    # Background frontier first: unset pixels touching the 0-marker.
    is_bg = padded == 0
    touches_bg = np.zeros_like(is_bg)
    touches_bg[1:, :] |= is_bg[:-1, :]
    touches_bg[:-1, :] |= is_bg[1:, :]
    touches_bg[:, 1:] |= is_bg[:, :-1]
    touches_bg[:, :-1] |= is_bg[:, 1:]
    frontier = np.flatnonzero((padded == _UNSET).ravel() & touches_bg.ravel())
    for idx in frontier.tolist():
        push(heap, (gray_flat[idx], 0, arrival, idx, 0))
        arrival += 1

    # Ring seeds next, in contour order, each pixel at its own intensity.
    for contour in contours:
        flat_ids = (contour.pixels[:, 0] + 1) * wp + (contour.pixels[:, 1] + 1)
        lbl = contour.label
        for idx in flat_ids.tolist():
            if labels_flat[idx] == _UNSET:
                push(heap, (gray_flat[idx], 1, arrival, idx, lbl))
                arrival += 1

    offsets = (-wp, -1, 1, wp)
    while heap:
        _, _, _, idx, lbl = pop(heap)
        if labels_flat[idx] != _UNSET:
            continue
        meets_other = False
        seen = lbl if lbl > 0 else 0
        for off in offsets:
            neighbor = labels_flat[idx + off]
            if neighbor > 0 and neighbor != seen:
                if seen:
                    meets_other = True
                    break
                seen = neighbor
        if meets_other:
            labels_flat[idx] = RIDGE
            continue
        labels_flat[idx] = lbl
        for off in offsets:
            j = idx + off
            if labels_flat[j] == _UNSET:
                push(heap, (gray_flat[j], 1 if lbl else 0, arrival, j, lbl))
                arrival += 1

    # Pockets walled off by ridges are unreachable; they are not stain.
    result = padded[1:-1, 1:-1].copy()
    result[result == _UNSET] = 0
    return LabelMap(result)


def extract_segments(label_map: LabelMap, min_area_px: int = 2) -> list[DropSegment]:
    """Summarize each positive label as a DropSegment, smallest areas dropped.

    Segments below min_area_px pixels are discarded as sensor noise.
    Ridge pixels carry no label and never count toward any area.
    """
    if min_area_px < 1:
        raise ValueError("min_area_px must be >= 1")
    labels = label_map.labels
    positive = np.where(labels > 0, labels, 0)
    flat = positive.ravel()
    counts = np.bincount(flat)
    if counts.size <= 1:
        return []
    ys, xs = np.nonzero(positive)
    vals = positive[ys, xs]
    size = counts.size
    sum_x = np.bincount(vals, weights=xs, minlength=size)
    sum_y = np.bincount(vals, weights=ys, minlength=size)
    x_min = np.full(size, label_map.width, dtype=np.int64)
    y_min = np.full(size, label_map.height, dtype=np.int64)
    x_max = np.full(size, -1, dtype=np.int64)
    y_max = np.full(size, -1, dtype=np.int64)
    np.minimum.at(x_min, vals, xs)
    np.minimum.at(y_min, vals, ys)
    np.maximum.at(x_max, vals, xs)
    np.maximum.at(y_max, vals, ys)

    segments: list[DropSegment] = []
    for lbl in range(1, size):
        area = int(counts[lbl])
        if area < min_area_px:
            continue
        segments.append(
            DropSegment(
                label=lbl,
                area_px=area,
                centroid=(float(sum_x[lbl] / area), float(sum_y[lbl] / area)),
                bbox=(int(x_min[lbl]), int(y_min[lbl]), int(x_max[lbl]), int(y_max[lbl])),
                width_px=int(x_max[lbl] - x_min[lbl] + 1),
                height_px=int(y_max[lbl] - y_min[lbl] + 1),
            )
        )
    return segments
