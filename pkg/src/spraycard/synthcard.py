"""Synthetic spray card rendering with exact ground truth.

Cards are described in physical micrometers and rasterized at a chosen
resolution by pixel-center sampling: a pixel belongs to a drop when its
center lies inside the disk, with no anti-aliasing. That makes the
rasterized pixel area of every drop an exact, countable quantity, which
the renderer records alongside the image so measurement code can be
checked against known truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CardGeometryError
from .metrics import UM_PER_INCH
from .raster import DEFAULT_THRESHOLD, RgbImage

#: Default card intensities, bright stock and a dark stain, chosen to sit
#: on opposite sides of the default binarization threshold.
BACKGROUND_INTENSITY = 0.85
DROP_INTENSITY = 0.10


@dataclass(frozen=True)
class SynthSpec:
    """Declarative description of one synthetic card.

    drops holds (center_x_um, center_y_um, diameter_um) triples. Drops
    must lie fully inside the card; intensities must straddle the default
    threshold so the standard pipeline separates stain from stock.
    """

    card_width_um: float
    card_height_um: float
    dpi: float
    drops: tuple[tuple[float, float, float], ...] = ()
    background_intensity: float = BACKGROUND_INTENSITY
    drop_intensity: float = DROP_INTENSITY
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.card_width_um <= 0 or self.card_height_um <= 0:
            raise ValueError("card dimensions must be positive")
        if self.dpi <= 0:
            raise ValueError("dpi must be positive")
        if not 0.0 <= self.drop_intensity < DEFAULT_THRESHOLD:
            raise ValueError(
                f"drop intensity must lie in [0, {DEFAULT_THRESHOLD}) so stains binarize"
            )
        if not DEFAULT_THRESHOLD < self.background_intensity <= 1.0:
            raise ValueError(
                f"background intensity must lie in ({DEFAULT_THRESHOLD}, 1] so stock binarizes"
            )
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be non-negative")
        drops = tuple((float(x), float(y), float(d)) for x, y, d in self.drops)
        object.__setattr__(self, "drops", drops)
        for cx, cy, diameter in drops:
            if diameter <= 0:
                raise ValueError("drop diameters must be positive")
            r = diameter / 2.0
            if cx - r < 0 or cx + r > self.card_width_um or cy - r < 0 or cy + r > self.card_height_um:
                raise CardGeometryError(
                    f"drop at ({cx}, {cy}) um with diameter {diameter} um crosses the card edge"
                )

    def image_size(self) -> tuple[int, int]:
        """Rendered (width_px, height_px), one pixel per dpi step."""
        w = max(1, int(round(self.card_width_um * self.dpi / UM_PER_INCH)))
        h = max(1, int(round(self.card_height_um * self.dpi / UM_PER_INCH)))
        return w, h

    def pixel_size_um(self) -> tuple[float, float]:
        """Micrometers covered by one pixel along x and y."""
        w, h = self.image_size()
        return self.card_width_um / w, self.card_height_um / h


@dataclass(frozen=True)
class TrueDrop:
    """Ground truth for one rendered drop.

    area_px counts the pixel centers falling inside this drop's own disk,
    so overlapping drops each report their full footprint. center_px is
    the disk center in pixel coordinates (x, y).
    """

    diameter_um: float
    area_px: int
    center_px: tuple[float, float]


@dataclass(frozen=True)
class GroundTruth:
    """Exact rasterization record for a rendered card."""

    image_width_px: int
    image_height_px: int
    drops: tuple[TrueDrop, ...] = field(default_factory=tuple)


def render(spec: SynthSpec) -> tuple[RgbImage, GroundTruth]:
    """Rasterize a card spec into an RGB image plus its ground truth.

    Intensities are quantized to the 8-bit grid before the image is
    built, so an in-memory render and a PNG round trip of the same spec
    analyze identically. Rendering is deterministic: the same spec always
    produces the same image, noise included.
    """
    width, height = spec.image_size()
    sx, sy = spec.pixel_size_um()
    xs = (np.arange(width) + 0.5) * sx
    ys = (np.arange(height) + 0.5) * sy

    intensity = np.full((height, width), spec.background_intensity, dtype=np.float64)
    truth: list[TrueDrop] = []
    for cx, cy, diameter in spec.drops:
        r = diameter / 2.0
        col_hit = np.flatnonzero(np.abs(xs - cx) <= r)
        row_hit = np.flatnonzero(np.abs(ys - cy) <= r)
        if col_hit.size and row_hit.size:
            dx = xs[col_hit] - cx
            dy = ys[row_hit] - cy
            inside = dy[:, None] ** 2 + dx[None, :] ** 2 <= r * r
            block = intensity[row_hit[0] : row_hit[-1] + 1, col_hit[0] : col_hit[-1] + 1]
            block[inside] = spec.drop_intensity
            area = int(inside.sum())
        else:
            area = 0
        truth.append(
            TrueDrop(
                diameter_um=diameter,
                area_px=area,
                center_px=(cx / sx - 0.5, cy / sy - 0.5),
            )
        )

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.rng_seed)
        intensity = intensity + rng.normal(0.0, spec.noise_sigma, intensity.shape)
        np.clip(intensity, 0.0, 1.0, out=intensity)

    quantized = np.round(intensity * 255.0) / 255.0
    rgb = np.repeat(quantized[:, :, None], 3, axis=2)
    return RgbImage(rgb), GroundTruth(
        image_width_px=width, image_height_px=height, drops=tuple(truth)
    )


def min_grid_spacing_um(diameter_um: float, dpi: float) -> float:
    """Smallest center spacing that keeps neighboring rings separated.

    Dilation widens each stain by up to two pixels of slack per side, so
    centers need the diameter plus twice that margin between them.
    """
    return diameter_um + 2.0 * (2.0 * UM_PER_INCH / dpi)


def grid_layout(
    card_width_um: float,
    card_height_um: float,
    dpi: float,
    diameter_um: float,
    count: int,
    spacing_um: float,
    origin_um: tuple[float, float] | None = None,
    **spec_kwargs,
) -> SynthSpec:
    """Lay out identical drops on a row-major grid.

    origin_um positions the first drop center; by default the grid block
    is centered on the card. Raises CardGeometryError when the spacing
    would let neighboring rings touch or the grid does not fit.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    floor_spacing = min_grid_spacing_um(diameter_um, dpi)
    if spacing_um <= floor_spacing:
        raise CardGeometryError(
            f"spacing {spacing_um} um would merge rings; need more than {floor_spacing} um"
        )
    r = diameter_um / 2.0
    usable_w = card_width_um - 2.0 * r
    cols = min(count, max(1, int(usable_w // spacing_um) + 1))
    rows = (count + cols - 1) // cols
    if origin_um is None:
        span_x = (cols - 1) * spacing_um
        span_y = (rows - 1) * spacing_um
        origin_um = (
            (card_width_um - span_x) / 2.0,
            (card_height_um - span_y) / 2.0,
        )
    ox, oy = origin_um
    drops = []
    for i in range(count):
        row, col = divmod(i, cols)
        drops.append((ox + col * spacing_um, oy + row * spacing_um, diameter_um))
    return SynthSpec(
        card_width_um=card_width_um,
        card_height_um=card_height_um,
        dpi=dpi,
        drops=tuple(drops),
        **spec_kwargs,
    )


def overlap_pair(
    diameter_um: float,
    center_distance_um: float | None = None,
    dpi: float = 600.0,
    **spec_kwargs,
) -> SynthSpec:
    """Two equal drops close enough to merge into one stain.

    The default center distance is 1.5 radii, well under the two radii
    where the disks would separate. The card is sized to fit the pair
    with a generous margin.
    """
    r = diameter_um / 2.0
    if center_distance_um is None:
        center_distance_um = 1.5 * r
    if not 0.0 < center_distance_um < diameter_um:
        raise CardGeometryError(
            "centers must be closer than the diameter for the disks to overlap"
        )
    card_w = center_distance_um + 6.0 * diameter_um
    card_h = 6.0 * diameter_um
    cy = card_h / 2.0
    cx0 = (card_w - center_distance_um) / 2.0
    drops = ((cx0, cy, diameter_um), (cx0 + center_distance_um, cy, diameter_um))
    return SynthSpec(
        card_width_um=card_w,
        card_height_um=card_h,
        dpi=dpi,
        drops=drops,
        **spec_kwargs,
    )


def control_card_layout(
    card_width_um: float = 76000.0,
    card_height_um: float = 26000.0,
    dpi: float = 600.0,
    drops_per_band: int = 10,
    **spec_kwargs,
) -> SynthSpec:
    """Bands of graduated drop sizes on one card, one size per row.

    Mirrors the layout of a printed control card: a row each of 50, 100,
    250, 500 and 1000 um drops, evenly spaced.
    """
    diameters = (50.0, 100.0, 250.0, 500.0, 1000.0)
    drops = []
    for band, diameter in enumerate(diameters):
        spacing = max(2.0 * diameter, 2.0 * min_grid_spacing_um(diameter, dpi))
        cy = card_height_um * (band + 1) / (len(diameters) + 1)
        span = (drops_per_band - 1) * spacing
        if span + diameter >= card_width_um:
            raise CardGeometryError(
                f"{drops_per_band} drops of {diameter} um do not fit across the card"
            )
        ox = (card_width_um - span) / 2.0
        for i in range(drops_per_band):
            drops.append((ox + i * spacing, cy, diameter))
    return SynthSpec(
        card_width_um=card_width_um,
        card_height_um=card_height_um,
        dpi=dpi,
        drops=tuple(drops),
        **spec_kwargs,
    )


def spec_to_dict(spec: SynthSpec) -> dict:
    """JSON-ready representation of a card spec."""
    return {
        "card_width_um": spec.card_width_um,
        "card_height_um": spec.card_height_um,
        "dpi": spec.dpi,
        "drops": [list(d) for d in spec.drops],
        "background_intensity": spec.background_intensity,
        "drop_intensity": spec.drop_intensity,
        "noise_sigma": spec.noise_sigma,
        "rng_seed": spec.rng_seed,
    }


def spec_from_dict(data: dict) -> SynthSpec:
    """Build and validate a SynthSpec from parsed JSON."""
    try:
        return SynthSpec(
            card_width_um=float(data["card_width_um"]),
            card_height_um=float(data["card_height_um"]),
            dpi=float(data["dpi"]),
            drops=tuple(tuple(d) for d in data.get("drops", ())),
            background_intensity=float(data.get("background_intensity", BACKGROUND_INTENSITY)),
            drop_intensity=float(data.get("drop_intensity", DROP_INTENSITY)),
            noise_sigma=float(data.get("noise_sigma", 0.0)),
            rng_seed=int(data.get("rng_seed", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed card spec: {exc}") from exc


def load_spec(path: str | Path) -> SynthSpec:
    """Read a SynthSpec from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def truth_to_dict(spec: SynthSpec, truth: GroundTruth) -> dict:
    """JSON-ready ground truth sidecar content."""
    return {
        "image": {
            "width_px": truth.image_width_px,
            "height_px": truth.image_height_px,
        },
        "drops": [
            {
                "diameter_um": d.diameter_um,
                "area_px": d.area_px,
                "center_px": list(d.center_px),
            }
            for d in truth.drops
        ],
        "spec": spec_to_dict(spec),
    }


def write_card_files(spec: SynthSpec, png_path: str | Path, truth_path: str | Path) -> GroundTruth:
    """Render a spec to a PNG image plus a ground-truth JSON sidecar."""
    from .imgio import save_rgb_png

    image, truth = render(spec)
    save_rgb_png(png_path, image)
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth_to_dict(spec, truth), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return truth
