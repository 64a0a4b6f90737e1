"""End-to-end measurement: raster steps, segmentation, then statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

from .metrics import (
    CalibrationParams,
    CardSpec,
    SprayReport,
    compute_report,
    px_to_um_ratio,
)
from .raster import (
    DEFAULT_THRESHOLD,
    BinaryImage,
    GrayImage,
    RgbImage,
    StructuringElement,
    binarize,
    contour_mask,
    dilate,
    erode,
    to_grayscale,
)
from .segmentation import DropSegment, LabelMap, extract_segments, find_contours, watershed


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs for one analysis run; defaults match the standard pipeline."""

    card_width_um: float
    card_height_um: float
    threshold: float = DEFAULT_THRESHOLD
    se_side: int = 3
    min_area_px: int = 2
    calibration: CalibrationParams = field(default_factory=CalibrationParams)

    def __post_init__(self) -> None:
        if self.min_area_px < 1:
            raise ValueError("min_area_px must be >= 1")
        # Fail early on bad values rather than mid-pipeline.
        StructuringElement(self.se_side)
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class AnalysisResult:
    """Everything one analysis produces, from masks to the final report."""

    report: SprayReport
    card: CardSpec
    segments: tuple[DropSegment, ...]
    label_map: LabelMap
    gray: GrayImage
    binary: BinaryImage


def analyze_image(image: RgbImage | GrayImage, config: AnalysisConfig) -> AnalysisResult:
    """Measure one card image.

    Color inputs are converted to grayscale first; grayscale inputs skip
    that step. The capture geometry is validated before any pixel work so
    a distorted capture fails fast. Stains are thresholded, ringed by the
    dilation/erosion difference, flooded from those rings, and finally
    summarized into a SprayReport.
    """
    gray = to_grayscale(image) if isinstance(image, RgbImage) else image
    card = CardSpec(
        card_width_um=config.card_width_um,
        card_height_um=config.card_height_um,
        image_width_px=gray.width,
        image_height_px=gray.height,
    )
    px_to_um_ratio(card)  # raises DistortedCaptureError on skewed captures

    binary = binarize(gray, config.threshold)
    se = StructuringElement(config.se_side)
    dilated = dilate(binary, se)
    eroded = erode(binary, se)
    rings = contour_mask(dilated, eroded)
    contours = find_contours(rings)
    label_map = watershed(gray, contours, background=BinaryImage(~dilated.pixels))
    segments = extract_segments(label_map, config.min_area_px)
    report = compute_report(segments, card, config.calibration)
    return AnalysisResult(
        report=report,
        card=card,
        segments=tuple(segments),
        label_map=label_map,
        gray=gray,
        binary=binary,
    )
