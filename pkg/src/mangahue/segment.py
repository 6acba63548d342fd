"""Trapped-ball segmentation of line art into closed color regions.

A square "ball" of shrinking diameter is slid inside the free (non-ink)
space. Areas the ball can reach without crossing a line become segments, so
small gaps in outlines do not leak color between regions the way a plain
flood fill would. After the diameter-2 pass, remaining free pixels adjacent
to segments are claimed by a simultaneous breadth-first expansion, and any
still-untouched free areas become their own single-pixel-scale segments.

Window anchor convention: a square element of side d is anchored
floor((d-1)/2) pixels up/left of its output pixel — the exact center for
odd d, the top-left pixel of the central 2x2 for even d.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .errors import BoundsError, DimensionError, ParameterError
from .raster import BinaryImage, ColorImage

_SENT = kernels.INT_SENTINEL


def _anchor(diameter: int) -> int:
    return (diameter - 1) // 2


@dataclass(frozen=True)
class BallSchedule:
    """Pass schedule: diameters run from initial_diameter down to 2."""

    initial_diameter: int

    def __post_init__(self):
        if self.initial_diameter < 2:
            raise ParameterError("initial_ball", self.initial_diameter, "> 1")

    def diameters(self) -> range:
        return range(self.initial_diameter, 1, -1)


@dataclass(frozen=True)
class Stroke:
    """One user-drawn polyline, rasterized at the given width."""

    points: tuple[tuple[int, int], ...]
    width: int = 2

    def __post_init__(self):
        if self.width < 1:
            raise ParameterError("stroke width", self.width, ">= 1")
        if not self.points:
            raise ValueError("a stroke needs at least one point")
        object.__setattr__(
            self, "points", tuple((int(x), int(y)) for x, y in self.points))


@dataclass(frozen=True)
class StrokeSet:
    """User gap-closing strokes, merged into the line art before segmentation."""

    strokes: tuple[Stroke, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))

    def __len__(self) -> int:
        return len(self.strokes)

    def to_obj(self) -> list[dict]:
        return [{"width": s.width, "points": [[x, y] for x, y in s.points]}
                for s in self.strokes]

    @classmethod
    def from_obj(cls, obj) -> "StrokeSet":
        """Parse the JSON shape: a list of {width, points} or {"strokes": [...]}."""
        if isinstance(obj, dict):
            obj = obj.get("strokes", [])
        if not isinstance(obj, list):
            raise ValueError("strokes JSON must be a list of {width, points} objects")
        strokes = []
        for item in obj:
            if not isinstance(item, dict) or "points" not in item:
                raise ValueError("each stroke needs a points list")
            pts = tuple((int(p[0]), int(p[1])) for p in item["points"])
            strokes.append(Stroke(points=pts, width=int(item.get("width", 2))))
        return cls(tuple(strokes))


@dataclass(frozen=True)
class SegmentRecord:
    """Per-segment metadata; bbox is (x0, y0, x1, y1), inclusive."""

    id: int
    pixel_count: int
    bbox: tuple[int, int, int, int]


@dataclass(frozen=True)
class SegmentMap:
    """Label grid (0 = line pixels, 1..n = segments) plus per-segment stats."""

    labels: np.ndarray
    segments: tuple[SegmentRecord, ...] = field(default=())

    def __post_init__(self):
        lab = np.ascontiguousarray(np.asarray(self.labels), dtype=np.int32).copy()
        if lab.ndim != 2:
            raise ValueError(f"labels must be 2-d, got shape {lab.shape}")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def segment_count(self) -> int:
        return len(self.segments)

    @classmethod
    def from_labels(cls, labels: np.ndarray, count: int) -> "SegmentMap":
        return cls(labels, _records_from_labels(labels, count))


def _records_from_labels(labels: np.ndarray, count: int) -> tuple[SegmentRecord, ...]:
    counts = np.bincount(labels.ravel(), minlength=count + 1)
    h, w = labels.shape
    x0 = np.full(count + 1, w, np.int64)
    x1 = np.full(count + 1, -1, np.int64)
    y0 = np.full(count + 1, h, np.int64)
    y1 = np.full(count + 1, -1, np.int64)
    ys, xs = np.nonzero(labels)
    ids = labels[ys, xs]
    np.minimum.at(x0, ids, xs)
    np.maximum.at(x1, ids, xs)
    np.minimum.at(y0, ids, ys)
    np.maximum.at(y1, ids, ys)
    return tuple(
        SegmentRecord(i, int(counts[i]), (int(x0[i]), int(y0[i]), int(x1[i]), int(y1[i])))
        for i in range(1, count + 1))


def segment_stats(seg: SegmentMap) -> tuple[SegmentRecord, ...]:
    """Recompute pixel counts and bboxes from the label grid."""
    count = int(seg.labels.max(initial=0))
    return _records_from_labels(seg.labels, count)


# ---------------------------------------------------------------------------
# strokes
# ---------------------------------------------------------------------------


def _line_pixels(x0: int, y0: int, x1: int, y1: int) -> Iterable[tuple[int, int]]:
    """Bresenham walk from (x0, y0) to (x1, y1), inclusive."""
    dx = abs(x1 - x0)
    sx = 1 if x0 < x1 else -1
    dy = -abs(y1 - y0)
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def merge_strokes(lines: BinaryImage, strokes: StrokeSet) -> BinaryImage:
    """Rasterize strokes into the line mask.

    Polyline segments are drawn with Bresenham and dilated to the stroke
    width (square element, usual anchor). Points outside the image raise
    BoundsError; the dilated footprint is clipped at the borders.
    """
    if not strokes.strokes:
        return lines
    h, w = lines.pixels.shape
    out = lines.pixels.copy()
    for stroke in strokes.strokes:
        for x, y in stroke.points:
            if not (0 <= x < w and 0 <= y < h):
                raise BoundsError(
                    f"stroke point ({x}, {y}) outside image {w}x{h}")
        d = stroke.width
        off = _anchor(d)
        pts = stroke.points
        pairs = zip(pts, pts[1:]) if len(pts) > 1 else [(pts[0], pts[0])]
        for (ax, ay), (bx, by) in pairs:
            for px, py in _line_pixels(ax, ay, bx, by):
                ys = max(py - off, 0)
                ye = min(py - off + d, h)
                xs = max(px - off, 0)
                xe = min(px - off + d, w)
                out[ys:ye, xs:xe] = True
    return BinaryImage(out)


# ---------------------------------------------------------------------------
# morphology
# ---------------------------------------------------------------------------


def erode(mask: BinaryImage, diameter: int) -> BinaryImage:
    """Erosion by a square element of side ``diameter``.

    Pixels outside the image count as background, so the element must fit
    entirely inside the image. Diameter 1 is the identity.
    """
    if diameter < 1:
        raise ParameterError("diameter", diameter, ">= 1")
    if diameter == 1:
        return mask
    return BinaryImage(kernels.window_all(mask.pixels, diameter, _anchor(diameter)))


def geodesic_dilate(seed: BinaryImage, mask: BinaryImage, diameter: int) -> BinaryImage:
    """Pixels a square ball covers while sliding inside ``mask`` from ``seed``.

    The ball starts on any valid placement (footprint fully inside the
    mask) that overlaps the seed and slides one pixel at a time through
    other valid placements. The result is the seed plus every footprint the
    ball can reach, so it never enters areas narrower than its diameter.
    Computed in closed form: label the valid placements by 4-connectivity,
    keep the placement components the seed touches, union their footprints.
    """
    if diameter < 1:
        raise ParameterError("diameter", diameter, ">= 1")
    if seed.pixels.shape != mask.pixels.shape:
        raise DimensionError(
            f"seed {seed.width}x{seed.height} vs mask {mask.width}x{mask.height}")
    if np.any(seed.pixels & ~mask.pixels):
        raise ValueError("geodesic_dilate: seed must lie inside mask")
    off = _anchor(diameter)
    roff = diameter - 1 - off
    placements = kernels.window_all(mask.pixels, diameter, off)
    if not placements.any():
        return BinaryImage(seed.pixels.copy())
    # a placement anchored at t covers [t - off, t - off + d), so its
    # footprint meets the seed exactly when window_any at offset ``off`` does
    touched = placements & kernels.window_any(seed.pixels, diameter, off)
    if not touched.any():
        return BinaryImage(seed.pixels.copy())
    comp, _ = kernels.label_components(placements, connectivity=4)
    keep = np.unique(comp[touched])
    reach = np.isin(comp, keep)
    covered = kernels.window_any(reach, diameter, roff)
    return BinaryImage(seed.pixels | covered)


def connected_components(mask: BinaryImage, connectivity: int = 4) -> tuple[np.ndarray, int]:
    """Label true regions 1..n in raster order of each region's first pixel."""
    return kernels.label_components(mask.pixels, connectivity)


# ---------------------------------------------------------------------------
# trapped-ball segmentation
# ---------------------------------------------------------------------------


def trapped_ball_segment(lines: BinaryImage, schedule: BallSchedule) -> SegmentMap:
    """Partition the free space of a line image into segments.

    For each diameter d from the schedule's start down to 2: erode the
    still-unassigned free space by the d-ball; every 4-connected component
    of that core founds a segment holding the pixels the ball covers when
    slid from the component (earlier segments win contested pixels; a
    claimed set split by such contention becomes one segment per connected
    part). Then labels expand into the remaining free pixels by multi-source
    BFS (4-connected, equidistant ties to the lower id), and whatever free
    areas stay unreached — enclosed slivers too thin for any ball — become
    segments of their own. Ids count up from 1 in creation order; line
    pixels keep label 0.
    """
    free = ~lines.pixels
    labels = np.zeros(free.shape, np.int32)
    unassigned = free.copy()
    next_id = 1
    for d in schedule.diameters():
        if not unassigned.any():
            break
        off = _anchor(d)
        roff = d - 1 - off
        core = kernels.window_all(unassigned, d, off)
        if not core.any():
            continue
        comp, n = kernels.label_components(core, connectivity=4)
        compvals = np.where(core, comp, _SENT).astype(np.int32)
        # For each placement, the lowest component id its footprint covers;
        # then per component the lowest such id anywhere on it. This makes a
        # contested pixel go to the earliest segment whose ball can cover it,
        # matching sequential creation order.
        fwd = kernels.window_min(compvals, d, off)
        mu = np.full(n + 1, _SENT, np.int32)
        np.minimum.at(mu, comp[core], fwd[core])
        muvals = np.where(core, mu[comp], _SENT).astype(np.int32)
        claim = kernels.window_min(muvals, d, roff)
        claim_mask = unassigned & (claim != _SENT)
        if not claim_mask.any():
            continue
        claim_ids = np.where(claim_mask, claim, 0).astype(np.int32)
        parts, pn = kernels.label_components_values(claim_ids, claim_mask)
        flat = parts.ravel()
        nz = np.flatnonzero(flat)
        first = np.full(pn + 1, flat.size, np.int64)
        np.minimum.at(first, flat[nz], nz)
        owner = claim_ids.ravel()[first[1:]]
        order = np.argsort(owner, kind="stable")  # parts are raster-ordered already
        remap = np.zeros(pn + 1, np.int32)
        remap[order + 1] = np.arange(pn, dtype=np.int32) + next_id
        labels[claim_mask] = remap[parts[claim_mask]]
        next_id += pn
        unassigned &= ~claim_mask
    kernels.expand_labels(labels, unassigned)
    unassigned &= labels == 0
    if unassigned.any():
        rem, rn = kernels.label_components(unassigned, connectivity=4)
        labels[unassigned] = rem[unassigned] + np.int32(next_id - 1)
        next_id += rn
    return SegmentMap.from_labels(labels, next_id - 1)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def render_labels(seg: SegmentMap, seed: int = 0) -> ColorImage:
    """Visualization PNG source: one seeded random color per segment, ink black."""
    rng = np.random.default_rng(seed)
    colors = rng.integers(0, 256, size=(seg.segment_count + 1, 3), dtype=np.uint8)
    colors[0] = 0
    return ColorImage(colors[seg.labels])


def segment_map_to_obj(seg: SegmentMap) -> dict:
    """Compact JSON-ready form: row-major run-length encoded label grid."""
    flat = seg.labels.ravel()
    starts = np.r_[0, np.flatnonzero(np.diff(flat)) + 1]
    lengths = np.diff(np.r_[starts, flat.size])
    return {
        "width": seg.width,
        "height": seg.height,
        "runs": [[int(v), int(n)] for v, n in zip(flat[starts], lengths)],
        "segments": [
            {"id": s.id, "pixel_count": s.pixel_count, "bbox": list(s.bbox)}
            for s in seg.segments
        ],
    }


def segment_map_from_obj(obj: dict) -> SegmentMap:
    """Inverse of segment_map_to_obj; stats are recomputed from the grid."""
    w, h = int(obj["width"]), int(obj["height"])
    runs = obj["runs"]
    values = np.array([r[0] for r in runs], np.int32)
    lengths = np.array([r[1] for r in runs], np.int64)
    if lengths.sum() != w * h:
        raise ValueError("run lengths do not cover the grid")
    flat = np.repeat(values, lengths)
    labels = flat.reshape(h, w)
    return SegmentMap.from_labels(labels, int(labels.max(initial=0)))


def segment_map_to_json(seg: SegmentMap) -> str:
    return json.dumps(segment_map_to_obj(seg), separators=(",", ":"))


def segment_map_from_json(text: str) -> SegmentMap:
    return segment_map_from_obj(json.loads(text))
