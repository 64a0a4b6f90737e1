"""Report artifacts: JSON documents, CSV tables, overlays, and figures.

The JSON document wraps a canonical payload (analysis results plus the
exact configuration and input identity) with a checksum over that
payload. The generation timestamp lives outside the checksummed payload,
so re-running the same input with the same configuration reproduces the
payload and its checksum byte for byte.
"""

from __future__ import annotations

import colorsys
import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .analysis import AnalysisConfig, AnalysisResult
from .imgio import save_array_png, to_uint8
from .metrics import RELIABILITY_LIMIT_PCT, SprayReport
from .raster import GrayImage, RgbImage
from .segmentation import RIDGE, LabelMap

CSV_COLUMNS = (
    "id",
    "area_px",
    "area_um2",
    "diameter_um",
    "calibrated_diameter_um",
    "centroid_x_px",
    "centroid_y_px",
)

_GOLDEN = 0.6180339887498949


def sha256_file(path: str | Path) -> str:
    """Hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_payload_bytes(payload: dict) -> bytes:
    """Stable serialization of the payload used for checksumming."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def build_document(result: AnalysisResult, config: AnalysisConfig, source: dict) -> dict:
    """Assemble the report JSON document for one analyzed card."""
    report = result.report
    payload = {
        "tool": {"name": "spraycard", "version": __version__},
        "input": dict(source),
        "config": {
            "card_width_um": config.card_width_um,
            "card_height_um": config.card_height_um,
            "threshold": config.threshold,
            "se_side": config.se_side,
            "min_area_px": config.min_area_px,
            "calibration": {
                "a": config.calibration.a,
                "b": config.calibration.b,
                "enabled": config.calibration.enabled,
            },
        },
        "report": {
            "drop_count": report.drop_count,
            "total_drop_area_um2": report.total_drop_area_um2,
            "density_per_cm2": report.density_per_cm2,
            "coverage_density_pct": report.coverage_density_pct,
            "vmd_um": report.vmd_um,
            "d10_um": report.d10_um,
            "d90_um": report.d90_um,
            "drs": report.drs,
            "reliability_warning": report.reliability_warning,
            "no_drops": report.no_drops,
        },
        "drops": [
            {
                "id": r.id,
                "area_px": r.area_px,
                "area_um2": r.area_um2,
                "diameter_um": r.diameter_um,
                "calibrated_diameter_um": r.calibrated_diameter_um,
                "centroid_x_px": r.centroid_x_px,
                "centroid_y_px": r.centroid_y_px,
            }
            for r in report.drops
        ],
    }
    return {
        "payload": payload,
        "payload_sha256": hashlib.sha256(canonical_payload_bytes(payload)).hexdigest(),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }


def write_document(document: dict, path: str | Path) -> None:
    """Write a report document as pretty-printed JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(report: SprayReport, path: str | Path) -> None:
    """Write the per-stain table, one row per measured drop."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in report.drops:
            writer.writerow(
                [
                    r.id,
                    r.area_px,
                    r.area_um2,
                    r.diameter_um,
                    r.calibrated_diameter_um,
                    r.centroid_x_px,
                    r.centroid_y_px,
                ]
            )


def segment_palette(labels: list[int]) -> dict[int, tuple[int, int, int]]:
    """A visually spread, guaranteed-distinct RGB color per label.

    Hues advance by the golden angle; on the rare quantization collision
    the value channel is nudged until the 8-bit color is unique.
    """
    palette: dict[int, tuple[int, int, int]] = {}
    used: set[tuple[int, int, int]] = set()
    for i, label in enumerate(labels):
        hue = (i * _GOLDEN) % 1.0
        sat = (0.85, 0.6)[i % 2]
        val = (0.95, 0.7)[(i // 2) % 2]
        while True:
            rgb = colorsys.hsv_to_rgb(hue, sat, val)
            color = tuple(int(round(c * 255.0)) for c in rgb)
            if color not in used:
                break
            val = val - 1.0 / 255.0 if val > 0.25 else 1.0
        used.add(color)
        palette[label] = color
    return palette


def render_overlay(
    image: RgbImage | GrayImage, label_map: LabelMap
) -> tuple[np.ndarray, dict[int, tuple[int, int, int]]]:
    """Paint each segment in its own color over the original image.

    Ridge pixels are drawn black so adjoining segments stay visibly
    separated. Returns the uint8 pixels and the label-to-color palette.
    """
    base = to_uint8(image)
    if base.ndim == 2:
        base = np.repeat(base[:, :, None], 3, axis=2)
    out = base.copy()
    labels = label_map.labels
    palette = segment_palette(label_map.segment_labels())
    for label, color in palette.items():
        out[labels == label] = color
    out[labels == RIDGE] = (0, 0, 0)
    return out, palette


def write_overlay(
    image: RgbImage | GrayImage, label_map: LabelMap, path: str | Path
) -> dict[int, tuple[int, int, int]]:
    """Render and save the overlay PNG; returns the palette used."""
    pixels, palette = render_overlay(image, label_map)
    save_array_png(path, pixels)
    return palette


def render_distribution_figure(report: SprayReport, path: str | Path) -> None:
    """Save a stain-size distribution figure for one card.

    Histogram of reported diameters with the D10 / VMD / D90 markers and
    a summary box. Cards without stains get an annotated empty plot.
    """
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.set_title("Stain size distribution")
    ax.set_xlabel("diameter (um)")
    ax.set_ylabel("stains")
    if report.no_drops:
        ax.text(
            0.5,
            0.5,
            "no stains detected",
            ha="center",
            va="center",
            transform=ax.transAxes,
            fontsize=14,
            color="gray",
        )
    else:
        diameters = [r.calibrated_diameter_um for r in report.drops]
        ax.hist(diameters, bins="auto", color="#4878a8", edgecolor="white")
        for value, style, name in (
            (report.d10_um, ":", "D10"),
            (report.vmd_um, "-", "VMD"),
            (report.d90_um, "--", "D90"),
        ):
            ax.axvline(value, color="#c0392b", linestyle=style, linewidth=1.2, label=name)
        ax.legend(loc="upper right")
        summary = (
            f"stains: {report.drop_count}\n"
            f"density: {report.density_per_cm2:.2f} /cm2\n"
            f"coverage: {report.coverage_density_pct:.2f} %\n"
            f"DRS: {report.drs:.3f}"
        )
        if report.reliability_warning:
            summary += f"\ncoverage > {RELIABILITY_LIMIT_PCT:.0f} %: counts unreliable"
        ax.text(
            0.02,
            0.98,
            summary,
            ha="left",
            va="top",
            transform=ax.transAxes,
            fontsize=9,
            bbox={"boxstyle": "round", "facecolor": "#f4f1e8", "alpha": 0.9},
        )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_batch_figure(rows: list[dict], path: str | Path) -> None:
    """Save a coverage and density comparison across a batch of cards."""
    fig, (ax_cov, ax_den) = plt.subplots(2, 1, figsize=(9.0, 6.0), sharex=True)
    measured = [r for r in rows if r.get("ok")]
    if measured:
        names = [Path(r["file"]).stem for r in measured]
        coverage = [r["report"]["coverage_density_pct"] for r in measured]
        density = [r["report"]["density_per_cm2"] for r in measured]
        xs = np.arange(len(names))
        ax_cov.bar(xs, coverage, color="#4878a8")
        ax_cov.axhline(
            RELIABILITY_LIMIT_PCT, color="#c0392b", linestyle="--", linewidth=1.0,
            label=f"reliability limit ({RELIABILITY_LIMIT_PCT:.0f} %)",
        )
        ax_cov.legend(loc="upper right")
        ax_den.bar(xs, density, color="#6aa84f")
        ax_den.set_xticks(xs)
        ax_den.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    else:
        for ax in (ax_cov, ax_den):
            ax.text(
                0.5, 0.5, "no cards analyzed", ha="center", va="center",
                transform=ax.transAxes, color="gray",
            )
    ax_cov.set_ylabel("coverage (%)")
    ax_den.set_ylabel("stains / cm2")
    ax_cov.set_title("Batch summary")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
