"""Line art extraction from screentoned greyscale pages.

The chain is: Gaussian blur (melts halftone dot patterns into flat grey),
adaptive mean threshold (keeps only pixels clearly darker than their
neighborhood), despeckle (drops tiny leftover islands). Solid strokes
survive because they stay darker than their local mean even after the blur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError
from .raster import BinaryImage, GreyImage, gaussian_blur


@dataclass(frozen=True)
class LineartParams:
    """Knobs for remove_screentone.

    blur_radius 0 skips the blur; adaptive_window is the odd side of the
    local-mean box; a pixel is ink when it is at least adaptive_offset
    darker than that mean; specks smaller than min_speck_area are dropped.
    """

    blur_radius: int = 1
    adaptive_window: int = 15
    adaptive_offset: int = 10
    min_speck_area: int = 10

    def __post_init__(self):
        if self.blur_radius < 0:
            raise ParameterError("blur_radius", self.blur_radius, ">= 0")
        if self.adaptive_window < 3 or self.adaptive_window % 2 == 0:
            raise ParameterError("adaptive_window", self.adaptive_window, "odd and >= 3")
        if self.adaptive_offset < 0:
            raise ParameterError("adaptive_offset", self.adaptive_offset, ">= 0")
        if self.min_speck_area < 0:
            raise ParameterError("min_speck_area", self.min_speck_area, ">= 0")


def binarize(grey: GreyImage, threshold: int) -> BinaryImage:
    """Ink where intensity is strictly below ``threshold``."""
    if not 0 <= threshold <= 255:
        raise ParameterError("binarize_threshold", threshold, "0 - 255")
    return BinaryImage(grey.pixels < threshold)


def despeckle(mask: BinaryImage, min_area: int) -> BinaryImage:
    """Drop 8-connected ink islands with fewer than ``min_area`` pixels."""
    if min_area < 0:
        raise ParameterError("min_speck_area", min_area, ">= 0")
    if min_area <= 1 or not mask.pixels.any():
        return mask
    labels, n = kernels.label_components(mask.pixels, connectivity=8)
    counts = np.bincount(labels.ravel(), minlength=n + 1)
    keep = counts >= min_area
    keep[0] = False
    return BinaryImage(keep[labels])


def _box_mean(plane: np.ndarray, window: int) -> np.ndarray:
    """Local mean over a window x window box, window clipped at the borders."""
    h, w = plane.shape
    r = window // 2
    ps = np.zeros((h + 1, w + 1), np.float64)
    np.cumsum(np.cumsum(plane, axis=0, dtype=np.float64), axis=1, out=ps[1:, 1:])
    y0 = np.clip(np.arange(h) - r, 0, h)
    y1 = np.clip(np.arange(h) + r + 1, 0, h)
    x0 = np.clip(np.arange(w) - r, 0, w)
    x1 = np.clip(np.arange(w) + r + 1, 0, w)
    sums = ps[np.ix_(y1, x1)] - ps[np.ix_(y0, x1)] - ps[np.ix_(y1, x0)] + ps[np.ix_(y0, x0)]
    counts = (y1 - y0)[:, None] * (x1 - x0)[None, :]
    return sums / counts


def remove_screentone(mono: GreyImage, params: LineartParams) -> BinaryImage:
    """Estimate the line drawing of a screentoned page.

    Returns a binary mask that is a subset of the pixels darker than their
    post-blur local mean; pure white input yields an empty mask.
    """
    blurred = gaussian_blur(mono, params.blur_radius)
    plane = blurred.pixels.astype(np.float64)
    mean = _box_mean(plane, params.adaptive_window)
    ink = plane < (mean - params.adaptive_offset)
    return despeckle(BinaryImage(ink), params.min_speck_area)
