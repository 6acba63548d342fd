"""Synthetic pages shared across the test suite."""

from __future__ import annotations

import numpy as np


def two_rooms(width: int = 48, height: int = 32, gap: int = 3) -> tuple[np.ndarray, tuple[int, int], tuple[int, int]]:
    """Two rooms separated by a one-pixel wall with a ``gap``-pixel doorway.

    Returns (lines, left_probe, right_probe) where the probes are (y, x)
    free pixels deep inside each room.
    """
    lines = np.zeros((height, width), bool)
    lines[0, :] = True
    lines[-1, :] = True
    lines[:, 0] = True
    lines[:, -1] = True
    mid = width // 2
    lines[:, mid] = True
    top = (height - gap) // 2
    lines[top:top + gap, mid] = False
    return lines, (height // 2, mid // 2), (height // 2, mid + mid // 2)


def random_maze(rng: np.random.Generator, height: int, width: int,
                wall_prob: float = 0.35) -> np.ndarray:
    """Random ink scribbles: border plus salted walls, as a line mask."""
    lines = rng.random((height, width)) < wall_prob
    lines[0, :] = True
    lines[-1, :] = True
    lines[:, 0] = True
    lines[:, -1] = True
    return lines


def screentone_page(height: int = 96, width: int = 96) -> tuple[np.ndarray, np.ndarray]:
    """A page with solid outlines and a dotted tone region.

    Returns (page, clean_lines): the greyscale page and the ink mask a
    perfect screentone removal would recover.
    """
    page = np.full((height, width), 255, np.uint8)
    clean = np.zeros((height, width), bool)
    # closed rectangle outline, 2 px thick
    y0, y1 = height // 6, height - height // 6
    x0, x1 = width // 6, width - width // 6
    clean[y0:y0 + 2, x0:x1] = True
    clean[y1 - 2:y1, x0:x1] = True
    clean[y0:y1, x0:x0 + 2] = True
    clean[y0:y1, x1 - 2:x1] = True
    page[clean] = 0
    # regular dot grid inside the rectangle: isolated dark single pixels
    for y in range(y0 + 6, y1 - 6, 4):
        for x in range(x0 + 6, x1 - 6, 4):
            page[y, x] = 40
    return page, clean


def flat_cartoon(cols: int = 4, rows: int = 2, cell: int | tuple[int, int] = 128,
                 outline: int = 2, palette: tuple[tuple[int, int, int], ...] = (
                     (190, 80, 70), (80, 170, 90), (75, 90, 180), (180, 170, 70),
                     (160, 80, 160), (80, 160, 160), (180, 120, 70), (120, 120, 120)),
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """A grid of flat-colored cells with black outlines.

    Returns (mono, truth, edges): the greyscale line-art page, the flat
    ground-truth coloring, and the outline mask. Cell count is cols * rows
    and the palette is consumed row-major. ``cell`` may be a single side
    length or an (height, width) pair.
    """
    cell_h, cell_w = (cell, cell) if isinstance(cell, int) else cell
    height, width = rows * cell_h, cols * cell_w
    truth = np.zeros((height, width, 3), np.uint8)
    edges = np.zeros((height, width), bool)
    for r in range(rows):
        for c in range(cols):
            color = palette[(r * cols + c) % len(palette)]
            truth[r * cell_h:(r + 1) * cell_h, c * cell_w:(c + 1) * cell_w] = color
    # internal + border outlines, ``outline`` px thick
    edges[:outline, :] = True
    edges[-outline:, :] = True
    edges[:, :outline] = True
    edges[:, -outline:] = True
    for r in range(1, rows):
        y = r * cell_h
        edges[y - outline // 2:y - outline // 2 + outline, :] = True
    for c in range(1, cols):
        x = c * cell_w
        edges[:, x - outline // 2:x - outline // 2 + outline] = True
    truth[edges] = 0
    mono = np.full((height, width), 255, np.uint8)
    mono[edges] = 0
    return mono, truth, edges
