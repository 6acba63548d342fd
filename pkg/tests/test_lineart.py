"""Binarization, speck removal, local-mean thresholding, screentone removal."""

from __future__ import annotations

import numpy as np
import pytest

from mangahue.errors import ParameterError
from mangahue.lineart import (
    LineartParams,
    _box_mean,
    binarize,
    despeckle,
    remove_screentone,
)
from mangahue.raster import BinaryImage, GreyImage

from fixtures import screentone_page
from oracles import brute_box_mean


class TestBinarize:
    def test_strictly_below_threshold(self):
        grey = GreyImage(np.array([[127, 128, 129]], np.uint8))
        mask = binarize(grey, 128)
        assert mask.pixels.tolist() == [[True, False, False]]

    def test_threshold_bounds(self):
        grey = GreyImage(np.zeros((1, 1), np.uint8))
        assert not binarize(grey, 0).pixels.any()
        assert binarize(grey, 255).pixels.all()
        for bad in (-1, 256):
            with pytest.raises(ParameterError) as err:
                binarize(grey, bad)
            assert err.value.field == "binarize_threshold"


class TestDespeckle:
    def _mask(self, *coords, shape=(8, 8)):
        px = np.zeros(shape, bool)
        for y, x in coords:
            px[y, x] = True
        return BinaryImage(px)

    def test_small_islands_dropped(self):
        mask = self._mask((1, 1), (5, 5), (5, 6), (6, 5))
        out = despeckle(mask, 3)
        assert not out.pixels[1, 1]
        assert out.pixels[5, 5] and out.pixels[5, 6] and out.pixels[6, 5]

    def test_area_equal_to_minimum_is_kept(self):
        mask = self._mask((2, 2), (2, 3))
        assert despeckle(mask, 2).pixels.sum() == 2
        assert despeckle(mask, 3).pixels.sum() == 0

    def test_diagonal_pixels_count_as_one_island(self):
        mask = self._mask((1, 1), (2, 2), (3, 3))
        assert despeckle(mask, 3).pixels.sum() == 3

    def test_identity_cases(self):
        mask = self._mask((1, 1))
        assert despeckle(mask, 1) is mask
        assert despeckle(mask, 0) is mask
        empty = BinaryImage(np.zeros((4, 4), bool))
        assert despeckle(empty, 10) is empty

    def test_negative_minimum_rejected(self):
        with pytest.raises(ParameterError):
            despeckle(self._mask((0, 0)), -1)


class TestBoxMean:
    def test_matches_oracle(self):
        rng = np.random.default_rng(81)
        for window in (3, 5, 9):
            plane = rng.integers(0, 256, (11, 7)).astype(np.float64)
            got = _box_mean(plane, window)
            want = brute_box_mean(plane, window)
            assert np.allclose(got, want, atol=1e-9), window

    def test_window_bigger_than_image(self):
        plane = np.arange(6, dtype=np.float64).reshape(2, 3)
        got = _box_mean(plane, 99)
        assert np.allclose(got, plane.mean())


class TestLineartParams:
    def test_defaults_are_valid(self):
        p = LineartParams()
        assert p.blur_radius == 1 and p.adaptive_window == 15
        assert p.adaptive_offset == 10 and p.min_speck_area == 10

    @pytest.mark.parametrize("kwargs,field", [
        (dict(blur_radius=-1), "blur_radius"),
        (dict(adaptive_window=2), "adaptive_window"),
        (dict(adaptive_window=4), "adaptive_window"),
        (dict(adaptive_offset=-1), "adaptive_offset"),
        (dict(min_speck_area=-1), "min_speck_area"),
    ])
    def test_rejects_out_of_range(self, kwargs, field):
        with pytest.raises(ParameterError) as err:
            LineartParams(**kwargs)
        assert err.value.field == field


class TestRemoveScreentone:
    def test_recovers_outline_and_drops_dots(self):
        page, clean = screentone_page()
        got = remove_screentone(GreyImage(page), LineartParams())
        # every true outline pixel recovered, every tone dot gone
        assert (got.pixels & clean).sum() == clean.sum()
        dots = (page == 40)
        assert not (got.pixels & dots).any()

    def test_pure_white_page_is_empty(self):
        page = GreyImage(np.full((32, 32), 255, np.uint8))
        assert not remove_screentone(page, LineartParams()).pixels.any()

    def test_pure_black_page_is_empty(self):
        # no pixel is darker than its neighborhood mean, so nothing is ink
        page = GreyImage(np.zeros((32, 32), np.uint8))
        assert not remove_screentone(page, LineartParams()).pixels.any()

    def test_ink_is_darker_than_local_mean(self):
        rng = np.random.default_rng(91)
        page = rng.integers(0, 256, (24, 24)).astype(np.uint8)
        params = LineartParams(min_speck_area=0)
        got = remove_screentone(GreyImage(page), params)
        from mangahue.raster import gaussian_blur
        blurred = gaussian_blur(GreyImage(page), params.blur_radius).pixels.astype(float)
        mean = brute_box_mean(blurred, params.adaptive_window)
        want = blurred < (mean - params.adaptive_offset)
        assert np.array_equal(got.pixels, want)

    def test_zero_blur_skips_smoothing(self):
        page, _ = screentone_page()
        params = LineartParams(blur_radius=0)
        got = remove_screentone(GreyImage(page), params)
        # with no blur the 1 px dots survive thresholding but die to despeckle
        assert got.pixels.sum() > 0
