"""Synthetic card tests: rendering, ground truth, layout guards, files."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from conftest import aligned_grid, pixel_scale
from reference import circle_overlap_area
from spraycard.errors import CardGeometryError
from spraycard.imgio import load_image
from spraycard.raster import binarize, to_grayscale
from spraycard.synthcard import (
    SynthSpec,
    control_card_layout,
    grid_layout,
    load_spec,
    min_grid_spacing_um,
    overlap_pair,
    render,
    spec_from_dict,
    spec_to_dict,
    truth_to_dict,
    write_card_files,
)


def single_drop_spec(diameter_um: float = 1000.0, dpi: float = 600.0) -> SynthSpec:
    return SynthSpec(
        card_width_um=8000.0,
        card_height_um=8000.0,
        dpi=dpi,
        drops=((4000.0, 4000.0, diameter_um),),
    )


class TestSpecValidation:
    def test_drop_crossing_the_edge_rejected(self):
        with pytest.raises(CardGeometryError):
            SynthSpec(4000.0, 4000.0, 600.0, drops=((100.0, 2000.0, 300.0),))

    def test_intensities_must_straddle_the_threshold(self):
        with pytest.raises(ValueError):
            SynthSpec(4000.0, 4000.0, 600.0, drop_intensity=0.5)
        with pytest.raises(ValueError):
            SynthSpec(4000.0, 4000.0, 600.0, background_intensity=0.2)

    def test_nonpositive_dimensions_rejected(self):
        with pytest.raises(ValueError):
            SynthSpec(0.0, 4000.0, 600.0)
        with pytest.raises(ValueError):
            SynthSpec(4000.0, 4000.0, 0.0)

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError):
            SynthSpec(4000.0, 4000.0, 600.0, noise_sigma=-0.1)

    def test_image_size_rounds_physical_extent(self):
        spec = SynthSpec(76000.0, 26000.0, 600.0)
        assert spec.image_size() == (1795, 614)

    def test_pixel_size_matches_image_size(self):
        spec = SynthSpec(76000.0, 26000.0, 600.0)
        sx, sy = spec.pixel_size_um()
        assert sx == pytest.approx(76000.0 / 1795)
        assert sy == pytest.approx(26000.0 / 614)


class TestRender:
    def test_deterministic_for_equal_specs(self):
        spec = single_drop_spec()
        image_a, truth_a = render(spec)
        image_b, truth_b = render(spec)
        assert np.array_equal(image_a.pixels, image_b.pixels)
        assert truth_a == truth_b

    def test_noiseless_card_has_exactly_two_intensities(self):
        image, _ = render(single_drop_spec())
        values = np.unique(image.pixels)
        assert values.size == 2

    def test_noise_changes_with_seed_only(self):
        spec = SynthSpec(
            4000.0, 4000.0, 300.0, drops=((2000.0, 2000.0, 800.0),), noise_sigma=0.02
        )
        seeded = SynthSpec(
            4000.0,
            4000.0,
            300.0,
            drops=((2000.0, 2000.0, 800.0),),
            noise_sigma=0.02,
            rng_seed=1,
        )
        image_a, _ = render(spec)
        image_b, _ = render(spec)
        image_c, _ = render(seeded)
        assert np.array_equal(image_a.pixels, image_b.pixels)
        assert not np.array_equal(image_a.pixels, image_c.pixels)

    def test_truth_counts_pixel_centers_inside_each_disk(self):
        spec = single_drop_spec()
        image, truth = render(spec)
        (drop,) = truth.drops
        dark = binarize(to_grayscale(image)).pixels
        assert drop.area_px == int(dark.sum())

    def test_truth_center_is_in_pixel_coordinates(self):
        spec = single_drop_spec()
        _, truth = render(spec)
        (drop,) = truth.drops
        sx, sy = spec.pixel_size_um()
        assert drop.center_px[0] == pytest.approx(4000.0 / sx - 0.5)
        assert drop.center_px[1] == pytest.approx(4000.0 / sy - 0.5)

    def test_aligned_thousand_micron_drop_covers_440_pixels(self):
        # Center on a pixel-center column and pixel-boundary row at
        # 600 dpi: the disk covers exactly 440 pixel centers.
        spec = aligned_grid(76000.0, 26000.0, 600.0, 1000.0, 1, 1)
        _, truth = render(spec)
        assert truth.drops[0].area_px == 440

    def test_rasterized_area_approaches_disk_area_for_big_drops(self):
        spec = single_drop_spec(3000.0)
        _, truth = render(spec)
        sx, sy = spec.pixel_size_um()
        analytic = math.pi * 1500.0**2
        rasterized = truth.drops[0].area_px * sx * sy
        assert rasterized == pytest.approx(analytic, rel=0.01)

    def test_overlapping_drops_record_their_own_full_footprint(self):
        spec = overlap_pair(1000.0)
        image, truth = render(spec)
        a, b = (t.area_px for t in truth.drops)
        dark = int(binarize(to_grayscale(image)).pixels.sum())
        # The union is smaller than the two footprints by the shared lens.
        assert dark < a + b
        sx, sy = spec.pixel_size_um()
        lens_px = (a + b) - dark
        analytic_lens = circle_overlap_area(500.0, 750.0) / (sx * sy)
        assert lens_px == pytest.approx(analytic_lens, rel=0.05)


class TestLayouts:
    def test_min_spacing_adds_dilation_slack(self):
        assert min_grid_spacing_um(1000.0, 600.0) == pytest.approx(
            1000.0 + 4.0 * 25400.0 / 600.0
        )

    def test_grid_layout_produces_requested_count(self):
        spec = grid_layout(76000.0, 26000.0, 600.0, 500.0, 18, 3000.0)
        assert len(spec.drops) == 18
        assert all(d == 500.0 for _, _, d in spec.drops)

    def test_grid_layout_rejects_merging_spacing(self):
        with pytest.raises(CardGeometryError):
            grid_layout(76000.0, 26000.0, 600.0, 1000.0, 10, 900.0)

    def test_grid_layout_rejects_grids_that_leave_the_card(self):
        with pytest.raises(CardGeometryError):
            grid_layout(6000.0, 6000.0, 600.0, 1000.0, 100, 2000.0)

    def test_grid_layout_honors_explicit_origin(self):
        spec = grid_layout(
            76000.0, 26000.0, 600.0, 500.0, 4, 2000.0, origin_um=(5000.0, 7000.0)
        )
        assert spec.drops[0][:2] == (5000.0, 7000.0)
        assert spec.drops[1][:2] == (7000.0, 7000.0)

    def test_overlap_pair_default_distance_is_1point5_radii(self):
        spec = overlap_pair(1000.0)
        (x0, y0, _), (x1, y1, _) = spec.drops
        assert y0 == y1
        assert x1 - x0 == pytest.approx(750.0)

    def test_overlap_pair_rejects_separated_disks(self):
        with pytest.raises(CardGeometryError):
            overlap_pair(1000.0, center_distance_um=1200.0)

    def test_control_card_has_five_bands(self):
        spec = control_card_layout(drops_per_band=6)
        assert len(spec.drops) == 30
        assert sorted({d for _, _, d in spec.drops}) == [50.0, 100.0, 250.0, 500.0, 1000.0]


class TestSerialization:
    def test_spec_dict_round_trip(self):
        spec = aligned_grid(20000.0, 10000.0, 300.0, 600.0, 4, 2)
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_truth_dict_carries_areas_and_centers(self):
        spec = single_drop_spec()
        _, truth = render(spec)
        data = truth_to_dict(spec, truth)
        assert data["image"]["width_px"] == truth.image_width_px
        assert len(data["drops"]) == 1
        assert data["drops"][0]["area_px"] == truth.drops[0].area_px
        assert spec_from_dict(data["spec"]) == spec

    def test_write_card_files_round_trips_through_png(self, tmp_path):
        spec = aligned_grid(12000.0, 9000.0, 600.0, 900.0, 2, 2, step_um=4000.0)
        png = tmp_path / "card.png"
        truth_path = tmp_path / "card.truth.json"
        truth = write_card_files(spec, png, truth_path)

        loaded = load_image(png)
        rendered, _ = render(spec)
        assert np.array_equal(loaded.pixels, rendered.pixels)

        on_disk = json.loads(truth_path.read_text())
        assert on_disk["image"]["width_px"] == truth.image_width_px
        assert [d["area_px"] for d in on_disk["drops"]] == [
            t.area_px for t in truth.drops
        ]

    def test_load_spec_reads_what_spec_to_dict_wrote(self, tmp_path):
        spec = single_drop_spec()
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec_to_dict(spec)))
        assert load_spec(path) == spec


class TestPixelScaleHelper:
    def test_matches_spec_image_size(self):
        spec = SynthSpec(76000.0, 26000.0, 600.0)
        w_px, sx = pixel_scale(76000.0, 600.0)
        h_px, sy = pixel_scale(26000.0, 600.0)
        assert (w_px, h_px) == spec.image_size()
        assert (sx, sy) == pytest.approx(spec.pixel_size_um())
