"""Training pairs: one color page, its mono counterpart, optional crops."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from mangahue.lineart import LineartParams, remove_screentone
from mangahue.raster import ColorImage, GreyImage, to_grey

from .errors import ConfigError


@dataclass(frozen=True)
class CropRect:
    """Pixel rectangle inside the training image, (x, y) top-left."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"crop {self.as_tuple()} has no area")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.width, self.height)


@dataclass(frozen=True)
class TrainingPair:
    """A mono page and its colorization, plus optional crop rectangles."""

    mono: GreyImage
    color: ColorImage
    crops: tuple[CropRect, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "crops", tuple(self.crops))
        if (self.mono.width, self.mono.height) != (self.color.width, self.color.height):
            raise ConfigError(
                f"mono {self.mono.width}x{self.mono.height} does not match "
                f"color {self.color.width}x{self.color.height}")
        for crop in self.crops:
            if crop.x < 0 or crop.y < 0 \
                    or crop.x + crop.width > self.color.width \
                    or crop.y + crop.height > self.color.height:
                raise ConfigError(
                    f"crop {crop.as_tuple()} outside "
                    f"{self.color.width}x{self.color.height}")


def make_training_pair(color: ColorImage, mode: str = "greyscale",
                       crops: tuple[CropRect, ...] = ()) -> TrainingPair:
    """Derive the mono side from the colorized page.

    "greyscale" keeps the luma image as-is; "lineart" runs screentone
    removal on it and renders the ink mask black-on-white.
    """
    grey = to_grey(color)
    if mode == "greyscale":
        mono = grey
    elif mode == "lineart":
        ink = remove_screentone(grey, LineartParams())
        mono = GreyImage(np.where(ink.pixels, 0, 255).astype(np.uint8))
    else:
        raise ConfigError(f"unknown pair mode {mode!r}; use greyscale or lineart")
    return TrainingPair(mono=mono, color=color, crops=crops)


def crop_variants(pair: TrainingPair) -> list[TrainingPair]:
    """The original pair followed by one cropped pair per rectangle."""
    variants = [TrainingPair(pair.mono, pair.color)]
    for c in pair.crops:
        ys, xs = slice(c.y, c.y + c.height), slice(c.x, c.x + c.width)
        variants.append(TrainingPair(
            GreyImage(pair.mono.pixels[ys, xs].copy()),
            ColorImage(pair.color.pixels[ys, xs].copy())))
    return variants


def crops_from_obj(obj) -> tuple[CropRect, ...]:
    """Parse a crops JSON payload: a list of {x, y, width, height}."""
    if not isinstance(obj, list):
        raise ConfigError("crops file must hold a JSON list of rectangles")
    rects = []
    for i, entry in enumerate(obj):
        try:
            rects.append(CropRect(int(entry["x"]), int(entry["y"]),
                                  int(entry["width"]), int(entry["height"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"crops[{i}]: expected x/y/width/height ints") from exc
    return tuple(rects)


# ---------------------------------------------------------------------------
# tensor conversion (value range [-1, 1], NCHW)
# ---------------------------------------------------------------------------


def mono_to_tensor(image: GreyImage) -> torch.Tensor:
    arr = image.pixels.astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(arr)[None, None]


def color_to_tensor(image: ColorImage) -> torch.Tensor:
    arr = image.pixels.astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(arr).permute(2, 0, 1)[None]


def tensor_to_color(t: torch.Tensor) -> ColorImage:
    arr = t.detach()[0].permute(1, 2, 0).numpy()
    # round half away from zero to mirror the pipeline's rasterization
    scaled = (np.clip(arr, -1.0, 1.0) + 1.0) * 127.5
    return ColorImage(np.floor(scaled + 0.5).clip(0, 255).astype(np.uint8))
