"""Command line interface for card analysis and synthetic card tooling.

Verbs:
  analyze    measure one card image and emit report artifacts
  batch      analyze every card image in a directory
  dpi-check  feasibility of resolving a diameter at a resolution
  synth      render a synthetic card spec to PNG plus ground truth

Exit codes for analyze: 0 success, 1 unreadable input, 2 success with a
coverage reliability warning (artifacts are still written), 3 distorted
capture geometry.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import AnalysisConfig, analyze_image
from .errors import DistortedCaptureError, ImageReadError, SprayCardError
from .imgio import load_image
from .metrics import RELIABILITY_LIMIT_PCT, CalibrationParams, pixels_for
from .raster import DEFAULT_THRESHOLD
from .report import (
    build_document,
    render_batch_figure,
    render_distribution_figure,
    sha256_file,
    write_csv,
    write_document,
    write_overlay,
)
from .synthcard import load_spec, write_card_files

EXIT_OK = 0
EXIT_UNREADABLE = 1
EXIT_RELIABILITY = 2
EXIT_DISTORTED = 3

_IMAGE_SUFFIXES = {".png", ".pgm"}


def _card_dims(text: str) -> tuple[float, float]:
    """Parse --card-um values of the form WIDTHxHEIGHT in micrometers."""
    try:
        w_text, h_text = text.lower().split("x", 1)
        w, h = float(w_text), float(h_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected WIDTHxHEIGHT in micrometers, e.g. 76000x26000, got {text!r}"
        )
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("card dimensions must be positive")
    return w, h


def _calibration(text: str) -> CalibrationParams:
    try:
        a_text, b_text = text.split(",", 1)
        return CalibrationParams(a=float(a_text), b=float(b_text), enabled=True)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected A,B coefficients, e.g. 0.2192733,1.227941, got {text!r}"
        )


def _add_analysis_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--card-um",
        type=_card_dims,
        required=True,
        metavar="WxH",
        help="physical card size in micrometers, width x height",
    )
    parser.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help=f"binarization threshold in (0, 1), default {DEFAULT_THRESHOLD}",
    )
    parser.add_argument(
        "--se-side",
        type=int,
        default=3,
        help="structuring element side, odd and >= 1, default 3",
    )
    parser.add_argument(
        "--min-area-px",
        type=int,
        default=2,
        help="discard segments smaller than this many pixels, default 2",
    )
    parser.add_argument(
        "--calibrate",
        type=_calibration,
        nargs="?",
        const=_calibration("0.2192733,1.227941"),
        default=CalibrationParams(),
        metavar="A,B",
        help="enable power-law diameter calibration; bare flag uses the built-in coefficients",
    )


def _config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    width, height = args.card_um
    return AnalysisConfig(
        card_width_um=width,
        card_height_um=height,
        threshold=args.threshold,
        se_side=args.se_side,
        min_area_px=args.min_area_px,
        calibration=args.calibrate,
    )


def _print_report_summary(label: str, report) -> None:
    print(
        f"{label}: {report.drop_count} stains, "
        f"density {report.density_per_cm2:.2f} /cm2, "
        f"coverage {report.coverage_density_pct:.2f} %"
    )
    if not report.no_drops:
        print(
            f"  D10 {report.d10_um:.1f} um, VMD {report.vmd_um:.1f} um, "
            f"D90 {report.d90_um:.1f} um, DRS {report.drs:.3f}"
        )
    if report.reliability_warning:
        print(
            f"  warning: coverage exceeds {RELIABILITY_LIMIT_PCT:.0f} %, "
            "stain counts are unreliable"
        )


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    try:
        image = load_image(args.image)
    except ImageReadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    try:
        result = analyze_image(image, config)
    except DistortedCaptureError as exc:
        print(f"error: {args.image}: {exc}", file=sys.stderr)
        return EXIT_DISTORTED

    source = {
        "file": Path(args.image).name,
        "sha256": sha256_file(args.image),
        "width_px": result.card.image_width_px,
        "height_px": result.card.image_height_px,
    }
    document = build_document(result, config, source)
    _print_report_summary(str(args.image), result.report)
    if args.out:
        write_document(document, args.out)
        print(f"  report: {args.out}")
    if args.csv:
        write_csv(result.report, args.csv)
        print(f"  csv: {args.csv}")
    if args.overlay:
        write_overlay(image, result.label_map, args.overlay)
        print(f"  overlay: {args.overlay}")
    if args.plot:
        render_distribution_figure(result.report, args.plot)
        print(f"  figure: {args.plot}")
    return EXIT_RELIABILITY if result.report.reliability_warning else EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_UNREADABLE
    files = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not files:
        print(f"error: no .png or .pgm files in {directory}", file=sys.stderr)
        return EXIT_UNREADABLE

    out_path = Path(args.out) if args.out else directory / "summary.json"
    out_dir = out_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[dict] = []
    for path in files:
        # Each card is analyzed independently; one bad file must not
        # disturb any other card's report.
        try:
            image = load_image(path)
            result = analyze_image(image, config)
        except SprayCardError as exc:
            rows.append({"file": path.name, "ok": False, "error": str(exc)})
            print(f"{path}: failed ({exc})", file=sys.stderr)
            continue
        source = {
            "file": path.name,
            "sha256": sha256_file(path),
            "width_px": result.card.image_width_px,
            "height_px": result.card.image_height_px,
        }
        document = build_document(result, config, source)
        report_path = out_dir / f"{path.name}.report.json"
        write_document(document, report_path)
        rows.append(
            {
                "file": path.name,
                "ok": True,
                "report": document["payload"]["report"],
                "report_file": report_path.name,
            }
        )
        _print_report_summary(str(path), result.report)

    analyzed = sum(1 for r in rows if r["ok"])
    aggregate = {
        "directory": str(directory),
        "analyzed": analyzed,
        "failed": len(rows) - analyzed,
        "cards": rows,
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"batch summary: {out_path} ({analyzed} analyzed, {len(rows) - analyzed} failed)")
    if args.plot:
        render_batch_figure(rows, args.plot)
        print(f"batch figure: {args.plot}")
    return EXIT_OK


def _cmd_dpi_check(args: argparse.Namespace) -> int:
    if args.diameter_um <= 0 or args.dpi <= 0:
        print("error: diameter and dpi must be positive", file=sys.stderr)
        return EXIT_UNREADABLE
    px = pixels_for(args.diameter_um, args.dpi)
    if px > 0:
        print(
            f"{args.diameter_um:g} um spans {px} px at {args.dpi:g} dpi: representable"
        )
    else:
        print(
            f"{args.diameter_um:g} um falls below one pixel at {args.dpi:g} dpi: "
            "not representable"
        )
    print(
        f"diameter_um={args.diameter_um:g},dpi={args.dpi:g},pixels={px},"
        f"representable={'yes' if px > 0 else 'no'}"
    )
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    try:
        spec = load_spec(args.spec)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {args.spec}: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    except SprayCardError as exc:
        print(f"error: {args.spec}: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    if args.seed is not None:
        spec = dataclasses.replace(spec, rng_seed=args.seed)
    out_path = Path(args.out)
    truth_path = Path(args.truth) if args.truth else out_path.with_suffix(".truth.json")
    try:
        truth = write_card_files(spec, out_path, truth_path)
    except SprayCardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    print(
        f"rendered {truth.image_width_px}x{truth.image_height_px} px card "
        f"with {len(truth.drops)} drops"
    )
    print(f"  image: {out_path}")
    print(f"  truth: {truth_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spraycard",
        description="Measure spray deposition quality from water-sensitive card images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="analyze one card image")
    p_analyze.add_argument("image", help="8-bit PNG or PGM card image")
    _add_analysis_options(p_analyze)
    p_analyze.add_argument("--out", help="write the report JSON here")
    p_analyze.add_argument("--csv", help="write the per-stain CSV table here")
    p_analyze.add_argument("--overlay", help="write the colored segment overlay PNG here")
    p_analyze.add_argument("--plot", help="write the size-distribution figure here")
    p_analyze.set_defaults(func=_cmd_analyze)

    p_batch = sub.add_parser("batch", help="analyze every card image in a directory")
    p_batch.add_argument("directory", help="directory holding .png / .pgm card images")
    _add_analysis_options(p_batch)
    p_batch.add_argument(
        "--out",
        help="aggregate summary JSON path (default: summary.json inside the directory); "
        "per-card reports are written alongside it",
    )
    p_batch.add_argument("--plot", help="write the batch comparison figure here")
    p_batch.set_defaults(func=_cmd_batch)

    p_dpi = sub.add_parser(
        "dpi-check", help="check whether a diameter is representable at a resolution"
    )
    p_dpi.add_argument("diameter_um", type=float, help="physical drop diameter in um")
    p_dpi.add_argument("dpi", type=float, help="capture resolution in dots per inch")
    p_dpi.set_defaults(func=_cmd_dpi_check)

    p_synth = sub.add_parser(
        "synth", help="render a synthetic card spec into PNG plus ground truth"
    )
    p_synth.add_argument("spec", help="card spec JSON file")
    p_synth.add_argument("--out", required=True, help="output PNG path")
    p_synth.add_argument(
        "--truth", help="ground-truth JSON path (default: output name with .truth.json)"
    )
    p_synth.add_argument("--seed", type=int, help="override the spec's noise seed")
    p_synth.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
