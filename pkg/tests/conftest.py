"""Shared synthetic-card builders for the test suite."""

from __future__ import annotations

from spraycard.metrics import UM_PER_INCH
from spraycard.synthcard import SynthSpec


def pixel_scale(card_um: float, dpi: float) -> tuple[int, float]:
    """(image extent in px, micrometers per pixel) along one axis."""
    extent = max(1, round(card_um * dpi / UM_PER_INCH))
    return extent, card_um / extent


def aligned_grid(
    card_width_um: float,
    card_height_um: float,
    dpi: float,
    diameter_um: float,
    count: int,
    cols: int,
    step_um: float = 3000.0,
    inset: float = 0.2,
) -> SynthSpec:
    """Row-major grid with every center at the same sub-pixel phase.

    Centers sit on pixel-center columns and pixel-boundary rows, and grid
    steps are whole pixels, so all drops of one size rasterize to the
    identical pixel count. That makes expected areas exact numbers instead
    of layout-dependent ranges.
    """
    w_px, sx = pixel_scale(card_width_um, dpi)
    h_px, sy = pixel_scale(card_height_um, dpi)
    step_x = max(1, round(step_um / sx))
    step_y = max(1, round(step_um / sy))
    col0 = round(w_px * inset)
    row0 = round(h_px * inset)
    drops = []
    for i in range(count):
        row, col = divmod(i, cols)
        cx = (col0 + col * step_x + 0.5) * sx
        cy = (row0 + row * step_y) * sy
        drops.append((cx, cy, diameter_um))
    return SynthSpec(
        card_width_um=card_width_um,
        card_height_um=card_height_um,
        dpi=dpi,
        drops=tuple(drops),
    )


def dense_square_card(count: int, cols: int) -> SynthSpec:
    """1,000 um drops packed on a 20 x 20 mm card at 600 dpi.

    With 132 drops (12 columns) nominal coverage is about 26%, above the
    reliability limit; 81 drops (9 columns) give about 16%, safely below.
    """
    return aligned_grid(
        20000.0,
        20000.0,
        600.0,
        1000.0,
        count,
        cols,
        step_um=1200.0,
        inset=0.05,
    )
