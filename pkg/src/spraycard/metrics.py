"""Physical spray statistics derived from segmented card images.

Pixel areas become micrometer diameters through the card scale factor,
then the per-stain diameters roll up into the usual spray quality
numbers: deposit density, coverage percentage, and the D10 / VMD / D90
percentile family with its relative span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DistortedCaptureError
from .segmentation import DropSegment

UM_PER_INCH = 25400.0

# Coverage above this share of the card makes counts unreliable because
# stains merge; reports carry a warning instead of failing.
RELIABILITY_LIMIT_PCT = 20.0

# Card and image aspect ratios may differ by at most this much before the
# capture is considered distorted.
ASPECT_TOLERANCE = 0.02

# A diameter mapping to fewer than this many pixels cannot be told apart
# from noise at that resolution.
_MIN_REPRESENTABLE_PX = 0.95


@dataclass(frozen=True)
class CardSpec:
    """Physical card dimensions paired with the captured image size."""

    card_width_um: float
    card_height_um: float
    image_width_px: int
    image_height_px: int

    def __post_init__(self) -> None:
        if self.card_width_um <= 0 or self.card_height_um <= 0:
            raise ValueError("card dimensions must be positive")
        if self.image_width_px < 1 or self.image_height_px < 1:
            raise ValueError("image dimensions must be positive")

    @property
    def area_cm2(self) -> float:
        return self.card_width_um * self.card_height_um / 1e8


@dataclass(frozen=True)
class CalibrationParams:
    """Power-law diameter correction d' = a * d**b, disabled by default."""

    a: float = 0.2192733
    b: float = 1.227941
    enabled: bool = False

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise ValueError("calibration coefficients must be positive")


@dataclass(frozen=True)
class DropRecord:
    """Per-stain measurement row as it appears in reports and CSV output."""

    id: int
    area_px: int
    area_um2: float
    diameter_um: float
    calibrated_diameter_um: float
    centroid_x_px: float
    centroid_y_px: float


@dataclass(frozen=True)
class SprayReport:
    """Card-level spray quality summary.

    Percentile fields are None when the card holds no stains; no_drops
    flags that case explicitly.
    """

    drop_count: int
    total_drop_area_um2: float
    density_per_cm2: float
    coverage_density_pct: float
    vmd_um: float | None
    d10_um: float | None
    d90_um: float | None
    drs: float | None
    reliability_warning: bool
    no_drops: bool
    drops: tuple[DropRecord, ...] = field(default_factory=tuple)


def px_to_um_ratio(card: CardSpec) -> float:
    """Micrometers represented by one pixel along the width axis.

    Raises DistortedCaptureError when width and height scales disagree by
    more than ASPECT_TOLERANCE, which indicates a skewed capture that
    would bias every area measurement.
    """
    ratio_w = card.card_width_um / card.image_width_px
    ratio_h = card.card_height_um / card.image_height_px
    if abs(ratio_w / ratio_h - 1.0) > ASPECT_TOLERANCE:
        raise DistortedCaptureError(
            f"width scale {ratio_w:.4f} um/px and height scale {ratio_h:.4f} um/px "
            f"differ by more than {ASPECT_TOLERANCE:.0%}"
        )
    return ratio_w


def segment_diameter_um(segment: DropSegment, um_per_px: float) -> float:
    """Equivalent-circle diameter of a segment: 2 * sqrt(area / pi) * scale."""
    return diameter_um_from_area(segment.area_px, um_per_px)


def diameter_um_from_area(area_px: float, um_per_px: float) -> float:
    """Diameter of the circle whose pixel area matches the measured one."""
    if area_px < 0:
        raise ValueError("area must be non-negative")
    return 2.0 * math.sqrt(area_px / math.pi) * um_per_px


def calibrate_diameter(diameter_um: float, params: CalibrationParams) -> float:
    """Apply the power-law correction when enabled, otherwise pass through."""
    if not params.enabled:
        return diameter_um
    return params.a * diameter_um**params.b


def percentile(values, p: float) -> float:
    """Percentile with linear interpolation between closest ranks.

    The sorted sample is indexed at rank p * (n - 1) counting from zero;
    fractional ranks interpolate between the bracketing observations.
    """
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise ValueError("cannot take a percentile of an empty sample")
    if not 0.0 <= p <= 100.0:
        raise ValueError("percentile must lie in [0, 100]")
    return float(np.percentile(data, p))


def pixels_for(diameter_um: float, dpi: float) -> int:
    """Pixels spanned by a physical diameter at the given resolution.

    Round to nearest; spans that fall short of one pixel (below 0.95 px
    before rounding) return 0, meaning the diameter is not representable
    at that resolution.
    """
    if diameter_um <= 0 or dpi <= 0:
        raise ValueError("diameter and dpi must be positive")
    span = diameter_um * dpi / UM_PER_INCH
    if span < _MIN_REPRESENTABLE_PX:
        return 0
    return int(math.floor(span + 0.5))


def compute_report(
    segments: list[DropSegment],
    card: CardSpec,
    calibration: CalibrationParams = CalibrationParams(),
) -> SprayReport:
    """Aggregate segments into a SprayReport.

    Coverage and density always come from raw pixel areas; calibration
    only reshapes the reported diameters and their percentiles. An empty
    segment list produces a zeroed report flagged no_drops rather than
    an error, since a clean card is a valid measurement.
    """
    um_per_px = px_to_um_ratio(card)
    records = []
    for segment in segments:
        area_um2 = segment.area_px * um_per_px * um_per_px
        diameter = diameter_um_from_area(segment.area_px, um_per_px)
        records.append(
            DropRecord(
                id=segment.label,
                area_px=segment.area_px,
                area_um2=area_um2,
                diameter_um=diameter,
                calibrated_diameter_um=calibrate_diameter(diameter, calibration),
                centroid_x_px=segment.centroid[0],
                centroid_y_px=segment.centroid[1],
            )
        )

    count = len(records)
    total_area_um2 = float(sum(r.area_um2 for r in records))
    coverage_pct = total_area_um2 / (card.card_width_um * card.card_height_um) * 100.0
    density = count / card.area_cm2

    if count == 0:
        return SprayReport(
            drop_count=0,
            total_drop_area_um2=0.0,
            density_per_cm2=0.0,
            coverage_density_pct=0.0,
            vmd_um=None,
            d10_um=None,
            d90_um=None,
            drs=None,
            reliability_warning=False,
            no_drops=True,
            drops=(),
        )

    reported = [r.calibrated_diameter_um for r in records]
    d10 = percentile(reported, 10.0)
    vmd = percentile(reported, 50.0)
    d90 = percentile(reported, 90.0)
    return SprayReport(
        drop_count=count,
        total_drop_area_um2=total_area_um2,
        density_per_cm2=density,
        coverage_density_pct=coverage_pct,
        vmd_um=vmd,
        d10_um=d10,
        d90_um=d90,
        drs=(d90 - d10) / vmd,
        reliability_warning=coverage_pct > RELIABILITY_LIMIT_PCT,
        no_drops=False,
        drops=tuple(records),
    )
