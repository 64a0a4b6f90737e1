"""Spray quality measurement from water-sensitive card images.

The library half of the tool: image types and raster transforms,
ring-seeded segmentation, spray statistics, and a synthetic card
generator with exact ground truth for validation. The command line
interface lives in spraycard.cli.
"""

__version__ = "0.1.0"

from .analysis import AnalysisConfig, AnalysisResult, analyze_image
from .errors import (
    CardGeometryError,
    DistortedCaptureError,
    ImageReadError,
    SprayCardError,
)
from .imgio import load_image, save_gray_pgm, save_rgb_png
from .metrics import (
    ASPECT_TOLERANCE,
    RELIABILITY_LIMIT_PCT,
    UM_PER_INCH,
    CalibrationParams,
    CardSpec,
    DropRecord,
    SprayReport,
    calibrate_diameter,
    compute_report,
    diameter_um_from_area,
    percentile,
    pixels_for,
    px_to_um_ratio,
    segment_diameter_um,
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
from .segmentation import (
    RIDGE,
    Contour,
    DropSegment,
    LabelMap,
    extract_segments,
    find_contours,
    watershed,
)
from .synthcard import (
    GroundTruth,
    SynthSpec,
    TrueDrop,
    control_card_layout,
    grid_layout,
    load_spec,
    min_grid_spacing_um,
    overlap_pair,
    render,
    spec_from_dict,
    spec_to_dict,
    write_card_files,
)

__all__ = [
    "__version__",
    "AnalysisConfig",
    "AnalysisResult",
    "analyze_image",
    "SprayCardError",
    "ImageReadError",
    "DistortedCaptureError",
    "CardGeometryError",
    "load_image",
    "save_rgb_png",
    "save_gray_pgm",
    "UM_PER_INCH",
    "RELIABILITY_LIMIT_PCT",
    "ASPECT_TOLERANCE",
    "CardSpec",
    "CalibrationParams",
    "DropRecord",
    "SprayReport",
    "px_to_um_ratio",
    "segment_diameter_um",
    "diameter_um_from_area",
    "calibrate_diameter",
    "percentile",
    "pixels_for",
    "compute_report",
    "DEFAULT_THRESHOLD",
    "RgbImage",
    "GrayImage",
    "BinaryImage",
    "StructuringElement",
    "to_grayscale",
    "binarize",
    "dilate",
    "erode",
    "contour_mask",
    "RIDGE",
    "Contour",
    "LabelMap",
    "DropSegment",
    "find_contours",
    "watershed",
    "extract_segments",
    "SynthSpec",
    "GroundTruth",
    "TrueDrop",
    "render",
    "grid_layout",
    "control_card_layout",
    "overlap_pair",
    "min_grid_spacing_um",
    "spec_to_dict",
    "spec_from_dict",
    "load_spec",
    "write_card_files",
]
