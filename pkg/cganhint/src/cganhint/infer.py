"""Checkpoint loading and hint generation."""

from __future__ import annotations

import os

import torch
from torch.nn import functional as F

from mangahue.raster import ColorImage, GreyImage

from .data import mono_to_tensor, tensor_to_color
from .errors import CganHintError
from .model import Generator


def load_generator(path: str) -> tuple[Generator, dict]:
    """Load a generator from a checkpoint file or a training output dir."""
    if os.path.isdir(path):
        path = os.path.join(path, "model.pt")
    if not os.path.exists(path):
        raise CganHintError(f"no checkpoint at {path}")
    payload = torch.load(path, map_location="cpu", weights_only=True)
    cfg = payload["config"]
    generator = Generator(cfg["base_channels"])
    generator.load_state_dict(payload["generator"])
    generator.eval()
    return generator, cfg


def infer(generator: Generator, target_mono: GreyImage, resolution: int) -> ColorImage:
    """Paint a hint: mono resized to the working resolution, one forward pass.

    The output stays at the working resolution; the colorization pipeline
    upscales hints to the target on its own.
    """
    t = mono_to_tensor(target_mono)
    t = F.interpolate(t, size=(resolution, resolution), mode="bilinear",
                      align_corners=False)
    with torch.no_grad():
        out = generator(t)
    return tensor_to_color(out)


def infer_file(model_path: str, target_mono: GreyImage) -> ColorImage:
    generator, cfg = load_generator(model_path)
    return infer(generator, target_mono, cfg["resolution"])
