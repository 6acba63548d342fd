"""Palette selection, saturation, k-means quantization, shading, compositing."""

from __future__ import annotations

import numpy as np
import pytest

from mangahue.colorops import (
    QuantizeParams,
    SegmentPalette,
    ShadeParams,
    apply_shading,
    composite_lines,
    increase_saturation,
    kmeans_rgb,
    quantize_colors,
    render_palette,
    select_segment_colors,
)
from mangahue.errors import DimensionError, ParameterError
from mangahue.raster import (
    BinaryImage,
    ColorImage,
    GreyImage,
    gaussian_blur,
    rgb_to_hsv_planes,
)
from mangahue.segment import SegmentMap

from oracles import kmeans_objective, rha, segment_mean_colors, shade_formula


def _color(px):
    return ColorImage(np.asarray(px, np.uint8))


class TestSegmentPalette:
    def test_json_roundtrip_sorted(self):
        pal = SegmentPalette({2: (0, 128, 255), 1: (255, 0, 0)})
        text = pal.to_json()
        assert text == '{"1":"#ff0000","2":"#0080ff"}'
        assert SegmentPalette.from_json(text) == pal

    def test_from_json_accepts_bare_hex(self):
        pal = SegmentPalette.from_json('{"1":"aabbcc"}')
        assert pal.colors[1] == (0xAA, 0xBB, 0xCC)

    def test_from_json_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            SegmentPalette.from_json('{"1":"#abc"}')

    def test_colors_are_read_only(self):
        pal = SegmentPalette({1: (1, 2, 3)})
        with pytest.raises(TypeError):
            pal.colors[2] = (4, 5, 6)


class TestSelectSegmentColors:
    def test_matches_mean_oracle(self):
        rng = np.random.default_rng(67)
        labels = rng.integers(0, 4, (9, 11)).astype(np.int32)
        seg = SegmentMap.from_labels(labels, 3)
        hint = _color(rng.integers(0, 256, (9, 11, 3)))
        filled, palette = select_segment_colors(seg, hint)
        want = segment_mean_colors(labels, hint.pixels)
        for sid, rgb in want.items():
            assert palette.colors[sid] == rgb
            assert (filled.pixels[labels == sid] == rgb).all()
        assert (filled.pixels[labels == 0] == 0).all()

    def test_rounds_half_away(self):
        labels = np.array([[1, 1]], np.int32)
        seg = SegmentMap.from_labels(labels, 1)
        hint = _color([[[10, 0, 0], [11, 0, 0]]])   # mean 10.5 -> 11
        _, palette = select_segment_colors(seg, hint)
        assert palette.colors[1] == (11, 0, 0)

    def test_dimension_mismatch(self):
        seg = SegmentMap.from_labels(np.ones((2, 2), np.int32), 1)
        with pytest.raises(DimensionError):
            select_segment_colors(seg, _color(np.zeros((3, 3, 3))))


class TestRenderPalette:
    def test_paints_edits_and_ignores_unknown_ids(self):
        labels = np.array([[0, 1], [2, 2]], np.int32)
        seg = SegmentMap.from_labels(labels, 2)
        pal = SegmentPalette({1: (9, 9, 9), 2: (1, 2, 3), 7: (250, 250, 250)})
        out = render_palette(seg, pal)
        assert tuple(out.pixels[0, 1]) == (9, 9, 9)
        assert tuple(out.pixels[1, 0]) == (1, 2, 3)
        assert tuple(out.pixels[0, 0]) == (0, 0, 0)


class TestIncreaseSaturation:
    def test_delta_zero_is_identity(self):
        img = _color(np.zeros((2, 2, 3)))
        assert increase_saturation(img, 0) is img

    @pytest.mark.parametrize("bad", [255, 300, -1])
    def test_rejects_out_of_range(self, bad):
        img = _color(np.zeros((1, 1, 3)))
        with pytest.raises(ParameterError) as err:
            increase_saturation(img, bad)
        assert err.value.field == "saturation_delta"
        assert err.value.permissible == "< 255"

    def test_achromatic_pixels_untouched(self):
        img = _color([[[128, 128, 128], [0, 0, 0], [255, 255, 255]]])
        out = increase_saturation(img, 50)
        assert np.array_equal(out.pixels, img.pixels)

    def test_edge_pixels_untouched(self):
        img = _color([[[200, 50, 50], [200, 50, 50]]])
        edges = BinaryImage(np.array([[True, False]]))
        out = increase_saturation(img, 60, edges)
        assert tuple(out.pixels[0, 0]) == (200, 50, 50)
        assert tuple(out.pixels[0, 1]) != (200, 50, 50)

    def test_saturation_rises_by_delta(self):
        rng = np.random.default_rng(73)
        px = rng.integers(0, 256, (8, 8, 3)).astype(np.uint8)
        img = _color(px)
        delta = 40
        out = increase_saturation(img, delta)
        h0, s0, v0 = rgb_to_hsv_planes(px)
        h1, s1, v1 = rgb_to_hsv_planes(out.pixels)
        chroma = s0 > 0
        want = np.minimum(s0.astype(int) + delta, 255)
        # one rounded RGB->HSV->RGB->HSV trip may drift a unit
        assert np.abs(s1[chroma].astype(int) - want[chroma]).max() <= 2
        assert np.abs(v1.astype(int) - v0.astype(int)).max() <= 1

    def test_hue_preserved(self):
        img = _color([[[200, 100, 50]]])
        h0, _, _ = rgb_to_hsv_planes(img.pixels)
        out = increase_saturation(img, 80)
        h1, _, _ = rgb_to_hsv_planes(out.pixels)
        diff = abs(float(h1[0, 0]) - float(h0[0, 0])) % 360.0
        assert min(diff, 360.0 - diff) <= 2.0

    def test_edges_dimension_mismatch(self):
        img = _color(np.full((2, 2, 3), 99))
        with pytest.raises(DimensionError):
            increase_saturation(img, 10, BinaryImage(np.zeros((3, 3), bool)))


class TestKmeans:
    def _random(self, seed, n=60):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0, 255, (n, 3))
        wts = rng.uniform(0.5, 12.0, n)
        return pts, wts

    def test_history_non_increasing(self):
        pts, wts = self._random(79)
        _, _, history = kmeans_rgb(pts, wts, 5, seed=3, max_iterations=50)
        assert len(history) >= 2
        for a, b in zip(history, history[1:]):
            assert b <= a + 1e-6 + 1e-12 * abs(a)

    def test_assignment_is_nearest_center(self):
        pts, wts = self._random(83)
        centers, assign, _ = kmeans_rgb(pts, wts, 4, seed=0, max_iterations=50)
        d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        own = d2[np.arange(len(pts)), assign]
        assert (own <= d2.min(axis=1) + 1e-7).all()

    def test_centers_are_weighted_means(self):
        pts, wts = self._random(89)
        centers, assign, _ = kmeans_rgb(pts, wts, 4, seed=1, max_iterations=100)
        for j in range(4):
            sel = assign == j
            assert sel.any()
            want = np.average(pts[sel], axis=0, weights=wts[sel])
            assert np.allclose(centers[j], want, atol=1e-8)

    def test_final_objective_matches_oracle(self):
        pts, wts = self._random(97)
        centers, assign, history = kmeans_rgb(pts, wts, 3, seed=2, max_iterations=50)
        want = kmeans_objective(pts, wts, centers, assign)
        # last history entry was taken before the final recentering
        assert want <= history[-1] + 1e-6

    def test_deterministic_per_seed(self):
        pts, wts = self._random(101)
        a = kmeans_rgb(pts, wts, 4, seed=7, max_iterations=50)
        b = kmeans_rgb(pts, wts, 4, seed=7, max_iterations=50)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        assert a[2] == b[2]

    def test_separated_clusters_recovered(self):
        rng = np.random.default_rng(103)
        blobs = [(20, 20, 20), (230, 30, 40), (40, 220, 200)]
        pts = np.concatenate(
            [np.array(c, float) + rng.normal(0, 2.0, (30, 3)) for c in blobs])
        wts = np.ones(len(pts))
        centers, assign, _ = kmeans_rgb(pts, wts, 3, seed=5, max_iterations=100)
        found = sorted(tuple(np.round(c)) for c in centers)
        want = sorted(tuple(map(float, c)) for c in blobs)
        for f, w in zip(found, want):
            assert np.allclose(f, w, atol=3.0)

    def test_no_empty_clusters(self):
        # two far points, k=3: one seeded center must go empty and be repaired
        pts = np.array([[0.0, 0.0, 0.0], [255.0, 255.0, 255.0],
                        [0.0, 0.0, 1.0], [255.0, 255.0, 254.0]])
        wts = np.ones(4)
        centers, assign, _ = kmeans_rgb(pts, wts, 3, seed=11, max_iterations=50)
        assert set(assign) == {0, 1, 2}


class TestQuantize:
    def test_few_uniques_pass_through_unchanged(self):
        px = np.zeros((4, 4, 3), np.uint8)
        px[:2] = (10, 20, 30)
        img = _color(px)
        assert quantize_colors(img, QuantizeParams(k=2)) is img
        assert quantize_colors(img, QuantizeParams(k=5)) is img

    def test_k_one_collapses_to_weighted_mean(self):
        rng = np.random.default_rng(107)
        px = rng.integers(0, 256, (10, 10, 3)).astype(np.uint8)
        out = quantize_colors(_color(px), QuantizeParams(k=1))
        flat = out.pixels.reshape(-1, 3)
        assert (flat == flat[0]).all()
        want = tuple(rha(float(px[:, :, c].mean())) for c in range(3))
        assert tuple(flat[0]) == want

    @pytest.mark.parametrize("k", [2, 5, 9])
    def test_at_most_k_colors(self, k):
        rng = np.random.default_rng(109)
        px = rng.integers(0, 256, (24, 24, 3)).astype(np.uint8)
        out = quantize_colors(_color(px), QuantizeParams(k=k))
        distinct = np.unique(out.pixels.reshape(-1, 3), axis=0)
        assert len(distinct) <= k

    def test_edges_keep_their_colors(self):
        rng = np.random.default_rng(113)
        px = rng.integers(0, 256, (12, 12, 3)).astype(np.uint8)
        edges = BinaryImage(rng.random((12, 12)) < 0.3)
        out = quantize_colors(_color(px), QuantizeParams(k=3), edges)
        assert np.array_equal(out.pixels[edges.pixels], px[edges.pixels])
        off_edge = np.unique(out.pixels[~edges.pixels].reshape(-1, 3), axis=0)
        assert len(off_edge) <= 3

    def test_same_seed_same_result(self):
        rng = np.random.default_rng(127)
        px = rng.integers(0, 256, (16, 16, 3)).astype(np.uint8)
        a = quantize_colors(_color(px), QuantizeParams(k=4, seed=9))
        b = quantize_colors(_color(px), QuantizeParams(k=4, seed=9))
        assert np.array_equal(a.pixels, b.pixels)

    def test_all_edges_is_identity(self):
        img = _color(np.zeros((3, 3, 3)))
        edges = BinaryImage(np.ones((3, 3), bool))
        assert quantize_colors(img, QuantizeParams(k=1), edges) is img

    def test_params_validation(self):
        with pytest.raises(ParameterError) as err:
            QuantizeParams(k=0)
        assert err.value.field == "k_colors"
        assert err.value.permissible == "> 0"

    def test_edges_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            quantize_colors(_color(np.zeros((2, 2, 3))), QuantizeParams(k=1),
                            BinaryImage(np.zeros((3, 3), bool)))


class TestShading:
    def test_matches_formula_oracle(self):
        rng = np.random.default_rng(131)
        color = rng.integers(0, 256, (10, 9, 3)).astype(np.uint8)
        mono = rng.integers(0, 256, (10, 9)).astype(np.uint8)
        params = ShadeParams(shade_radius=3)
        got = apply_shading(_color(color), GreyImage(mono), params)
        blurred = gaussian_blur(GreyImage(mono), params.shade_radius).pixels
        want = shade_formula(color, blurred, params.divisor)
        assert np.array_equal(got.pixels, want)

    def test_white_page_changes_nothing(self):
        color = _color(np.full((5, 5, 3), 140))
        mono = GreyImage(np.full((5, 5), 255, np.uint8))
        out = apply_shading(color, mono, ShadeParams(shade_radius=2))
        assert np.array_equal(out.pixels, color.pixels)

    def test_black_page_drops_a_third(self):
        color = _color(np.full((5, 5, 3), 200))
        mono = GreyImage(np.zeros((5, 5), np.uint8))
        out = apply_shading(color, mono, ShadeParams(shade_radius=2))
        assert (out.pixels == 200 - 85).all()

    def test_clamps_at_zero(self):
        color = _color(np.full((3, 3, 3), 10))
        mono = GreyImage(np.zeros((3, 3), np.uint8))
        out = apply_shading(color, mono, ShadeParams(shade_radius=1))
        assert (out.pixels == 0).all()

    def test_param_validation(self):
        with pytest.raises(ParameterError):
            ShadeParams(shade_radius=-1)
        with pytest.raises(ParameterError):
            ShadeParams(shade_radius=1, divisor=0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_shading(_color(np.zeros((2, 2, 3))),
                          GreyImage(np.zeros((3, 3), np.uint8)),
                          ShadeParams(shade_radius=1))


class TestComposite:
    def test_lines_become_black(self):
        img = _color(np.full((3, 3, 3), 99))
        lines = np.zeros((3, 3), bool)
        lines[1, 1] = True
        out = composite_lines(img, BinaryImage(lines))
        assert tuple(out.pixels[1, 1]) == (0, 0, 0)
        assert tuple(out.pixels[0, 0]) == (99, 99, 99)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            composite_lines(_color(np.zeros((2, 2, 3))),
                            BinaryImage(np.zeros((3, 3), bool)))
