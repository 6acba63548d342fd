"""Generator and discriminator for single-pair image-to-image training.

Encoder-decoder generator with skip connections (mono in, color out) and a
patch-level discriminator judging (mono, color) pairs. Four stride-2 levels
each way, so spatial dimensions must be multiples of 16.
"""

from __future__ import annotations

import torch
from torch import nn


def _init_weights(module: nn.Module) -> None:
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.normal_(module.weight, 0.0, 0.02)
        if module.bias is not None:
            nn.init.zeros_(module.bias)
    elif isinstance(module, nn.InstanceNorm2d) and module.affine:
        nn.init.normal_(module.weight, 1.0, 0.02)
        nn.init.zeros_(module.bias)


def _down(cin: int, cout: int, norm: bool = True) -> nn.Sequential:
    layers: list[nn.Module] = [nn.Conv2d(cin, cout, 4, 2, 1)]
    if norm:
        layers.append(nn.InstanceNorm2d(cout, affine=True))
    layers.append(nn.LeakyReLU(0.2, inplace=True))
    return nn.Sequential(*layers)


def _up(cin: int, cout: int) -> nn.Sequential:
    return nn.Sequential(
        nn.ConvTranspose2d(cin, cout, 4, 2, 1),
        nn.InstanceNorm2d(cout, affine=True),
        nn.ReLU(inplace=True),
    )


class Generator(nn.Module):
    """U-shaped mono-to-color translator, tanh output in [-1, 1]."""

    def __init__(self, base: int = 32):
        super().__init__()
        self.enc1 = _down(1, base, norm=False)
        self.enc2 = _down(base, base * 2)
        self.enc3 = _down(base * 2, base * 4)
        self.enc4 = _down(base * 4, base * 8)
        self.dec4 = _up(base * 8, base * 4)
        self.dec3 = _up(base * 8, base * 2)
        self.dec2 = _up(base * 4, base)
        self.dec1 = nn.Sequential(
            nn.ConvTranspose2d(base * 2, 3, 4, 2, 1), nn.Tanh())
        self.apply(_init_weights)

    def forward(self, mono: torch.Tensor) -> torch.Tensor:
        e1 = self.enc1(mono)
        e2 = self.enc2(e1)
        e3 = self.enc3(e2)
        e4 = self.enc4(e3)
        d4 = self.dec4(e4)
        d3 = self.dec3(torch.cat([d4, e3], dim=1))
        d2 = self.dec2(torch.cat([d3, e2], dim=1))
        return self.dec1(torch.cat([d2, e1], dim=1))


class Discriminator(nn.Module):
    """Patch-level judge of (mono, color): a grid of real/fake logits."""

    def __init__(self, base: int = 32):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(4, base, 4, 2, 1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(base, base * 2, 4, 2, 1),
            nn.InstanceNorm2d(base * 2, affine=True),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(base * 2, base * 4, 4, 1, 1),
            nn.InstanceNorm2d(base * 4, affine=True),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(base * 4, 1, 4, 1, 1),
        )
        self.apply(_init_weights)

    def forward(self, mono: torch.Tensor, color: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([mono, color], dim=1))
