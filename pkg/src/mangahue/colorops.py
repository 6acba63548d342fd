"""Color application over a segment map: pick, saturate, quantize, shade."""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionError, ParameterError
from .raster import (
    BinaryImage,
    ColorImage,
    GreyImage,
    gaussian_blur,
    hsv_to_rgb_planes,
    rgb_to_hsv_planes,
    round_half_away,
)


@dataclass(frozen=True)
class SegmentPalette:
    """Segment id -> RGB triple. Hand-editable and re-renderable."""

    colors: Mapping[int, tuple[int, int, int]]

    def __post_init__(self):
        fixed = {int(k): (int(v[0]), int(v[1]), int(v[2]))
                 for k, v in dict(self.colors).items()}
        object.__setattr__(self, "colors", MappingProxyType(fixed))

    def __len__(self) -> int:
        return len(self.colors)

    def to_json(self) -> str:
        return json.dumps(
            {str(k): "#{:02x}{:02x}{:02x}".format(*v) for k, v in sorted(self.colors.items())},
            separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SegmentPalette":
        raw = json.loads(text)
        colors = {}
        for k, v in raw.items():
            s = v.lstrip("#")
            if len(s) != 6:
                raise ValueError(f"palette entry {k}: expected #rrggbb, got {v!r}")
            colors[int(k)] = (int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))
        return cls(colors)


@dataclass(frozen=True)
class QuantizeParams:
    """k-means color count, RNG seed, and the Lloyd iteration cap."""

    k: int
    seed: int = 0
    max_iterations: int = 50

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError("k_colors", self.k, "> 0")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations", self.max_iterations, ">= 1")


@dataclass(frozen=True)
class ShadeParams:
    """Shading blur radius; the darkness divisor is fixed at 3."""

    shade_radius: int
    divisor: int = 3

    def __post_init__(self):
        if self.shade_radius < 0:
            raise ParameterError("shade_radius", self.shade_radius, ">= 0")
        if self.divisor < 1:
            raise ParameterError("divisor", self.divisor, ">= 1")


# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------


def select_segment_colors(seg, hint: ColorImage) -> tuple[ColorImage, SegmentPalette]:
    """Fill every segment with the mean hint color under it.

    The hint must already be resized to the segment map's dimensions.
    Line pixels (label 0) come out black.
    """
    labels = seg.labels
    if labels.shape != hint.pixels.shape[:2]:
        raise DimensionError(
            f"hint {hint.width}x{hint.height} vs segments {seg.width}x{seg.height}")
    n = seg.segment_count
    flat = labels.ravel()
    counts = np.bincount(flat, minlength=n + 1).astype(np.float64)
    counts[counts == 0] = 1.0
    lut = np.zeros((n + 1, 3), np.uint8)
    for c in range(3):
        sums = np.bincount(flat, weights=hint.pixels[:, :, c].ravel(), minlength=n + 1)
        lut[:, c] = round_half_away(sums / counts).astype(np.uint8)
    lut[0] = 0
    palette = SegmentPalette({i: tuple(int(v) for v in lut[i]) for i in range(1, n + 1)})
    return ColorImage(lut[labels]), palette


def render_palette(seg, palette: SegmentPalette) -> ColorImage:
    """Paint a (possibly hand-edited) palette back onto the segment map."""
    n = seg.segment_count
    lut = np.zeros((n + 1, 3), np.uint8)
    for i, rgb in palette.colors.items():
        if 1 <= i <= n:
            lut[i] = rgb
    return ColorImage(lut[seg.labels])


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------


def increase_saturation(image: ColorImage, delta: int,
                        edges: Optional[BinaryImage] = None) -> ColorImage:
    """Add ``delta`` to the HSV saturation of every colored pixel.

    Saturation clamps at 255; hue and value ride through the conversion
    (drift at most 1 unit / 1 degree). Achromatic pixels and edge pixels
    are left untouched. Delta 0 returns the input unchanged.
    """
    if delta >= 255 or delta < 0:
        raise ParameterError("saturation_delta", delta, "< 255")
    if delta == 0:
        return image
    h, s, v = rgb_to_hsv_planes(image.pixels)
    mask = s > 0
    if edges is not None:
        if edges.pixels.shape != mask.shape:
            raise DimensionError(
                f"edges {edges.width}x{edges.height} vs image {image.width}x{image.height}")
        mask &= ~edges.pixels
    s2 = np.where(mask, np.minimum(s.astype(np.int64) + delta, 255), s).astype(np.uint8)
    converted = hsv_to_rgb_planes(h, s2, v)
    out = np.where(mask[..., None], converted, image.pixels)
    return ColorImage(out)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def kmeans_rgb(points: np.ndarray, weights: np.ndarray, k: int, seed: int,
               max_iterations: int) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Weighted k-means in RGB space.

    k-means++ seeding from the given seed, Lloyd iterations until the
    assignment stabilizes or the cap is reached, empty clusters repaired by
    re-seeding on the farthest point. Returns (centers float64 (k, 3),
    assignment (n,), objective history — one entry per iteration).
    """
    pts = np.asarray(points, dtype=np.float64)
    wts = np.asarray(weights, dtype=np.float64)
    n = pts.shape[0]
    rng = np.random.default_rng(seed)

    def d2_to(center):
        diff = pts - center
        return np.einsum("ij,ij->i", diff, diff)

    centers = np.empty((k, 3), np.float64)
    prob = wts / wts.sum()
    centers[0] = pts[rng.choice(n, p=prob)]
    best = d2_to(centers[0])
    for j in range(1, k):
        mass = wts * best
        total = mass.sum()
        if total <= 0.0:
            pick = int(rng.choice(n, p=prob))
        else:
            pick = int(rng.choice(n, p=mass / total))
        centers[j] = pts[pick]
        np.minimum(best, d2_to(centers[j]), out=best)

    history: list[float] = []
    assign = np.zeros(n, np.int64)
    sq = np.einsum("ij,ij->i", pts, pts)
    for _ in range(max_iterations):
        csq = np.einsum("ij,ij->i", centers, centers)
        dist2 = sq[:, None] - 2.0 * (pts @ centers.T) + csq[None, :]
        np.maximum(dist2, 0.0, out=dist2)
        new_assign = np.argmin(dist2, axis=1)
        history.append(float((wts * dist2[np.arange(n), new_assign]).sum()))
        wsum = np.bincount(new_assign, weights=wts, minlength=k)
        repaired = False
        if np.any(wsum == 0):
            far = dist2[np.arange(n), new_assign] * wts
            for j in np.flatnonzero(wsum == 0):
                pick = int(np.argmax(far))
                centers[j] = pts[pick]
                new_assign[pick] = j
                far[pick] = -1.0
            repaired = True
            wsum = np.bincount(new_assign, weights=wts, minlength=k)
        if not repaired and np.array_equal(new_assign, assign) and len(history) > 1:
            assign = new_assign
            break
        assign = new_assign
        wsum[wsum == 0] = 1.0
        for c in range(3):
            centers[:, c] = np.bincount(assign, weights=wts * pts[:, c], minlength=k) / wsum
    return centers, assign, history


def quantize_colors(image: ColorImage, params: QuantizeParams,
                    edges: Optional[BinaryImage] = None) -> ColorImage:
    """Reduce the image to at most k flat colors (edge pixels excluded).

    When the image already has no more than k distinct colors among the
    considered pixels, it passes through exactly.
    """
    px = image.pixels
    if edges is not None and edges.pixels.shape != px.shape[:2]:
        raise DimensionError(
            f"edges {edges.width}x{edges.height} vs image {image.width}x{image.height}")
    consider = np.ones(px.shape[:2], bool) if edges is None else ~edges.pixels
    if not consider.any():
        return image
    packed = (px[:, :, 0].astype(np.uint32) << 16) \
        | (px[:, :, 1].astype(np.uint32) << 8) | px[:, :, 2].astype(np.uint32)
    sel = packed[consider]
    uniq, inverse, counts = np.unique(sel, return_inverse=True, return_counts=True)
    if uniq.size <= params.k:
        return image
    pts = np.stack([(uniq >> 16) & 0xFF, (uniq >> 8) & 0xFF, uniq & 0xFF],
                   axis=1).astype(np.float64)
    centers, assign, _ = kmeans_rgb(pts, counts.astype(np.float64), params.k,
                                    params.seed, params.max_iterations)
    lut = np.clip(round_half_away(centers), 0, 255).astype(np.uint8)
    out = px.copy()
    out[consider] = lut[assign[inverse]]
    return ColorImage(out)


# ---------------------------------------------------------------------------
# shading and compositing
# ---------------------------------------------------------------------------


def apply_shading(image: ColorImage, mono: GreyImage, params: ShadeParams) -> ColorImage:
    """Darken colors where the original page is dark.

    Each channel drops by round((255 - M) / divisor) where M is the
    Gaussian-blurred greyscale page; results clamp at 0. A pure-white page
    (M = 255 everywhere) leaves the image untouched.
    """
    if mono.pixels.shape != image.pixels.shape[:2]:
        raise DimensionError(
            f"mono {mono.width}x{mono.height} vs image {image.width}x{image.height}")
    blurred = gaussian_blur(mono, params.shade_radius)
    drop = round_half_away((255.0 - blurred.pixels.astype(np.float64)) / params.divisor)
    out = np.clip(image.pixels.astype(np.float64) - drop[:, :, None], 0, 255)
    return ColorImage(out.astype(np.uint8))


def composite_lines(image: ColorImage, lines: BinaryImage) -> ColorImage:
    """Stamp line pixels pure black over the colored image."""
    if lines.pixels.shape != image.pixels.shape[:2]:
        raise DimensionError(
            f"lines {lines.width}x{lines.height} vs image {image.width}x{image.height}")
    out = image.pixels.copy()
    out[lines.pixels] = 0
    return ColorImage(out)
