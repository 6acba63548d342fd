"""Adversarial single-pair training with an L1 reconstruction anchor."""

from __future__ import annotations

import csv
import os
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from .data import TrainingPair, color_to_tensor, crop_variants, mono_to_tensor
from .errors import ConfigError
from .model import Discriminator, Generator

LOSS_COLUMNS = ("iteration", "l1", "adversarial")


@dataclass(frozen=True)
class TrainConfig:
    """Iteration budget, working resolution, and loss balance."""

    iterations: int = 500
    resolution: int = 256
    l1_weight: float = 100.0
    seed: int = 0
    checkpoint_interval: int = 100
    base_channels: int = 32
    learning_rate: float = 2e-4

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1 (got {self.iterations})")
        if self.resolution < 16 or self.resolution % 16 != 0:
            raise ConfigError(
                f"resolution must be a positive multiple of 16 (got {self.resolution})")
        if self.checkpoint_interval < 1:
            raise ConfigError(
                f"checkpoint_interval must be >= 1 (got {self.checkpoint_interval})")


@dataclass(frozen=True)
class TrainResult:
    generator: Generator
    discriminator: Discriminator
    log: tuple[tuple[int, float, float], ...]


def smoothed(values: list[float], index: int, window: int = 10) -> float:
    """Trailing mean of values[max(0, index-window+1) .. index]."""
    lo = max(0, index - window + 1)
    return float(np.mean(values[lo:index + 1]))


def _jittered_sample(mono: torch.Tensor, color: torch.Tensor, res: int,
                     rng: np.random.Generator) -> tuple[torch.Tensor, torch.Tensor]:
    """Random translation against a reflected border, plus random flip.

    The variant is first brought to the working resolution (a no-op when it
    is already there), then shifted by up to res/16 pixels. Translation
    keeps the page sharp; resample-based jitter measurably slows
    single-pair convergence.
    """
    if mono.shape[2] != res or mono.shape[3] != res:
        mono = F.interpolate(mono, size=(res, res), mode="bilinear",
                             align_corners=False)
        color = F.interpolate(color, size=(res, res), mode="bilinear",
                              align_corners=False)
    margin = max(1, res // 16)
    mono = F.pad(mono, (margin,) * 4, mode="reflect")
    color = F.pad(color, (margin,) * 4, mode="reflect")
    y = int(rng.integers(0, 2 * margin + 1))
    x = int(rng.integers(0, 2 * margin + 1))
    mono = mono[:, :, y:y + res, x:x + res]
    color = color[:, :, y:y + res, x:x + res]
    if rng.integers(0, 2) == 1:
        mono = torch.flip(mono, dims=(3,))
        color = torch.flip(color, dims=(3,))
    return mono, color


def checkpoint_payload(generator: Generator, cfg: TrainConfig, iteration: int,
                       discriminator: Discriminator | None = None) -> dict:
    return {
        "generator": generator.state_dict(),
        "discriminator": discriminator.state_dict() if discriminator else None,
        "config": asdict(cfg),
        "iteration": iteration,
    }


def train(pair: TrainingPair, cfg: TrainConfig,
          out_dir: str | None = None) -> TrainResult:
    """One generator+discriminator update per iteration on a sampled crop.

    Every source of randomness (weight init, crop choice, jitter, flip)
    flows from cfg.seed. With out_dir set, writes losses.csv, periodic
    checkpoint_NNNNNN.pt files, and a final model.pt.
    """
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    generator = Generator(cfg.base_channels)
    discriminator = Discriminator(cfg.base_channels)
    opt_g = torch.optim.Adam(generator.parameters(), lr=cfg.learning_rate,
                             betas=(0.5, 0.999))
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=cfg.learning_rate,
                             betas=(0.5, 0.999))
    bce = nn.BCEWithLogitsLoss()
    l1 = nn.L1Loss()

    variants = [(mono_to_tensor(v.mono), color_to_tensor(v.color))
                for v in crop_variants(pair)]

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    log: list[tuple[int, float, float]] = []
    for iteration in range(1, cfg.iterations + 1):
        vi = int(rng.integers(0, len(variants)))
        mono, color = _jittered_sample(*variants[vi], cfg.resolution, rng)

        fake = generator(mono)

        verdict_real = discriminator(mono, color)
        verdict_fake = discriminator(mono, fake.detach())
        loss_d = 0.5 * (bce(verdict_real, torch.ones_like(verdict_real))
                        + bce(verdict_fake, torch.zeros_like(verdict_fake)))
        opt_d.zero_grad()
        loss_d.backward()
        opt_d.step()

        verdict = discriminator(mono, fake)
        loss_adv = bce(verdict, torch.ones_like(verdict))
        loss_l1 = l1(fake, color)
        loss_g = loss_adv + cfg.l1_weight * loss_l1
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()

        log.append((iteration, float(loss_l1.item()), float(loss_adv.item())))

        if out_dir is not None and iteration % cfg.checkpoint_interval == 0:
            torch.save(checkpoint_payload(generator, cfg, iteration, discriminator),
                       os.path.join(out_dir, f"checkpoint_{iteration:06d}.pt"))

    if out_dir is not None:
        torch.save(checkpoint_payload(generator, cfg, cfg.iterations, discriminator),
                   os.path.join(out_dir, "model.pt"))
        with open(os.path.join(out_dir, "losses.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(LOSS_COLUMNS)
            writer.writerows(log)

    return TrainResult(generator, discriminator, tuple(log))
