"""Raster image types and the pixel-level operations everything else builds on.

Conventions shared across the package:

* integer rounding is always half away from zero (never banker's rounding),
* uint8 arithmetic happens in float64 and is rounded exactly once,
* blur borders replicate the edge pixel,
* hue is degrees in [0, 360); saturation and value are 0-255 integers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .errors import DimensionError, MangahueError


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x)
    return np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))


def _as_uint8(px: np.ndarray, what: str) -> np.ndarray:
    px = np.asarray(px)
    if px.dtype != np.uint8:
        if not np.issubdtype(px.dtype, np.integer):
            raise ValueError(f"{what} must be uint8, got {px.dtype}")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise ValueError(f"{what} values must lie in 0..255")
        px = px.astype(np.uint8)
    return px


@dataclass(frozen=True)
class ColorImage:
    """RGB raster, shape (height, width, 3), uint8, immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        px = _as_uint8(self.pixels, "ColorImage pixels")
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"ColorImage expects (h, w, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("ColorImage needs width, height >= 1")
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GreyImage:
    """Single-channel raster, shape (height, width), uint8, immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        px = _as_uint8(self.pixels, "GreyImage pixels")
        if px.ndim != 2:
            raise ValueError(f"GreyImage expects (h, w), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("GreyImage needs width, height >= 1")
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryImage:
    """Boolean raster, True = ink/line pixel, immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.bool_:
            raise ValueError(f"BinaryImage must be boolean, got {px.dtype}")
        if px.ndim != 2:
            raise ValueError(f"BinaryImage expects (h, w), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("BinaryImage needs width, height >= 1")
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


class Hsv(NamedTuple):
    """Hue in degrees [0, 360), saturation and value as 0-255 integers."""

    h: float
    s: int
    v: int


AnyImage = Union[ColorImage, GreyImage, BinaryImage]


# ---------------------------------------------------------------------------
# Gaussian blur
# ---------------------------------------------------------------------------


def gaussian_weights(radius: int) -> np.ndarray:
    """Sampled Gaussian taps for half-width ``radius``, normalized to sum 1."""
    sigma = max(radius / 2.0, 0.5)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return w / w.sum()


def gaussian_blur(image: Union[ColorImage, GreyImage], radius: int) -> Union[ColorImage, GreyImage]:
    """Separable Gaussian blur with edge replication; radius 0 is identity."""
    if radius < 0:
        raise ValueError("blur radius must be >= 0")
    if radius == 0:
        return image
    wts = gaussian_weights(radius)
    px = image.pixels
    if isinstance(image, GreyImage):
        out = kernels.blur_separable(px.astype(np.float64), wts)
        return GreyImage(np.clip(round_half_away(out), 0, 255).astype(np.uint8))
    planes = [kernels.blur_separable(px[:, :, c].astype(np.float64), wts) for c in range(3)]
    out = np.stack(planes, axis=-1)
    return ColorImage(np.clip(round_half_away(out), 0, 255).astype(np.uint8))


# ---------------------------------------------------------------------------
# color space conversions (hexcone model)
# ---------------------------------------------------------------------------


def rgb_to_hsv_planes(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized RGB->HSV on a (..., 3) uint8 array.

    Returns (h float64 degrees [0,360), s uint8, v uint8).
    """
    f = rgb.astype(np.float64)
    r, g, b = f[..., 0], f[..., 1], f[..., 2]
    mx = np.max(f, axis=-1)
    mn = np.min(f, axis=-1)
    c = mx - mn
    with np.errstate(divide="ignore", invalid="ignore"):
        hr = (60.0 * ((g - b) / c)) % 360.0
        hg = 60.0 * ((b - r) / c) + 120.0
        hb = 60.0 * ((r - g) / c) + 240.0
        s_f = np.where(mx > 0, 255.0 * c / np.where(mx > 0, mx, 1.0), 0.0)
    h = np.where(c == 0, 0.0, np.where(r == mx, hr, np.where(g == mx, hg, hb)))
    s = round_half_away(s_f).astype(np.uint8)
    v = mx.astype(np.uint8)
    return h, s, v


def hsv_to_rgb_planes(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized HSV->RGB; returns (..., 3) uint8."""
    h = np.asarray(h, dtype=np.float64)
    sf = np.asarray(s, dtype=np.float64)
    vf = np.asarray(v, dtype=np.float64)
    c = sf * vf / 255.0
    hp = (h % 360.0) / 60.0
    x = c * (1.0 - np.abs(hp % 2.0 - 1.0))
    m = vf - c
    sector = np.floor(hp).astype(np.int64) % 6
    zeros = np.zeros_like(c)
    r1 = np.choose(sector, [c, x, zeros, zeros, x, c])
    g1 = np.choose(sector, [x, c, c, x, zeros, zeros])
    b1 = np.choose(sector, [zeros, zeros, x, c, c, x])
    out = np.stack([r1 + m, g1 + m, b1 + m], axis=-1)
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def rgb_to_hsv(rgb: tuple[int, int, int]) -> Hsv:
    """Convert one RGB triple to Hsv."""
    arr = np.array([rgb], dtype=np.uint8)
    h, s, v = rgb_to_hsv_planes(arr)
    return Hsv(float(h[0]), int(s[0]), int(v[0]))


def hsv_to_rgb(hsv: Hsv) -> tuple[int, int, int]:
    """Convert one Hsv triple back to RGB."""
    out = hsv_to_rgb_planes(np.array([hsv.h]), np.array([hsv.s]), np.array([hsv.v]))
    return int(out[0, 0]), int(out[0, 1]), int(out[0, 2])


# ---------------------------------------------------------------------------
# greyscale and resize
# ---------------------------------------------------------------------------


def to_grey(image: ColorImage) -> GreyImage:
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), ties away from zero."""
    f = image.pixels.astype(np.float64)
    y = 0.299 * f[:, :, 0] + 0.587 * f[:, :, 1] + 0.114 * f[:, :, 2]
    return GreyImage(np.clip(round_half_away(y), 0, 255).astype(np.uint8))


def resize_bilinear(image: ColorImage, width: int, height: int) -> ColorImage:
    """Bilinear resample with half-pixel-centered sampling.

    Same dimensions in and out is an exact identity.
    """
    if width < 1 or height < 1:
        raise ValueError("resize target must be at least 1x1")
    sh, sw = image.pixels.shape[:2]
    if (sw, sh) == (width, height):
        return image
    src = image.pixels.astype(np.float64)

    def _axis(n_dst: int, n_src: int):
        pos = (np.arange(n_dst, dtype=np.float64) + 0.5) * (n_src / n_dst) - 0.5
        pos = np.clip(pos, 0.0, n_src - 1.0)
        i0 = np.floor(pos).astype(np.int64)
        i1 = np.minimum(i0 + 1, n_src - 1)
        return i0, i1, pos - i0

    x0, x1, fx = _axis(width, sw)
    y0, y1, fy = _axis(height, sh)
    fx = fx[None, :, None]
    fy = fy[:, None, None]
    p00 = src[np.ix_(y0, x0)]
    p01 = src[np.ix_(y0, x1)]
    p10 = src[np.ix_(y1, x0)]
    p11 = src[np.ix_(y1, x1)]
    top = p00 * (1.0 - fx) + p01 * fx
    bottom = p10 * (1.0 - fx) + p11 * fx
    out = top * (1.0 - fy) + bottom * fy
    return ColorImage(np.clip(round_half_away(out), 0, 255).astype(np.uint8))


# ---------------------------------------------------------------------------
# PNG / JPEG codec boundary
# ---------------------------------------------------------------------------


def _to_pil(image: AnyImage) -> Image.Image:
    if isinstance(image, ColorImage):
        return Image.fromarray(image.pixels, mode="RGB")
    if isinstance(image, GreyImage):
        return Image.fromarray(image.pixels, mode="L")
    if isinstance(image, BinaryImage):
        return Image.fromarray(np.where(image.pixels, 0, 255).astype(np.uint8), mode="L")
    raise TypeError(f"cannot encode {type(image).__name__}")


def encode_png(image: AnyImage) -> bytes:
    """Serialize an image to PNG bytes (binary images as black ink on white)."""
    buf = io.BytesIO()
    _to_pil(image).save(buf, format="PNG")
    return buf.getvalue()


def save_image(image: AnyImage, path: str) -> None:
    """Write a PNG file; binary images are written as black ink on white."""
    try:
        with open(path, "wb") as fh:
            fh.write(encode_png(image))
    except OSError as exc:
        raise MangahueError(f"cannot write {path}: {exc}") from exc


def _open_image(source) -> Image.Image:
    try:
        if isinstance(source, (bytes, bytearray)):
            img = Image.open(io.BytesIO(source))
        else:
            img = Image.open(source)
        img.load()
        return img
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise MangahueError(f"cannot decode image: {exc}") from exc


def load_color(source) -> ColorImage:
    """Read a PNG/JPEG file path or bytes as RGB (greyscale gets promoted)."""
    return ColorImage(np.asarray(_open_image(source).convert("RGB")))


def load_grey(source) -> GreyImage:
    """Read a PNG/JPEG file path or bytes as single-channel greyscale."""
    return GreyImage(np.asarray(_open_image(source).convert("L")))


def ensure_same_dims(a: AnyImage, b: AnyImage, what: str) -> None:
    """Raise DimensionError naming ``what`` when two rasters disagree in size."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionError(
            f"{what}: expected {a.width}x{a.height}, got {b.width}x{b.height}")
