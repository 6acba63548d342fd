"""The colorization pipeline: stage graph, caching, and selective rerun.

Stage order: lineart -> segmentation -> selection -> saturation ->
quantization -> shading -> final. Every stage is a pure function of its
upstream stages plus parameters, so rerunning from the earliest stage a
parameter touches is bit-identical to a fresh run.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .colorops import (
    QuantizeParams,
    SegmentPalette,
    ShadeParams,
    apply_shading,
    composite_lines,
    increase_saturation,
    quantize_colors,
    select_segment_colors,
)
from .errors import DimensionError, ParameterError
from .lineart import LineartParams, binarize, remove_screentone
from .raster import (
    BinaryImage,
    ColorImage,
    GreyImage,
    load_color,
    resize_bilinear,
    save_image,
)
from .segment import (
    BallSchedule,
    SegmentMap,
    StrokeSet,
    merge_strokes,
    render_labels,
    trapped_ball_segment,
)

STAGES = ("lineart", "segmentation", "selection", "saturation",
          "quantization", "shading", "final")

# Earliest stage each input/parameter feeds into.
PARAM_STAGE: Mapping[str, str] = MappingProxyType({
    "target": "lineart",
    "lineart": "lineart",
    "screentones": "lineart",
    "blur_radius": "lineart",
    "adaptive_window": "lineart",
    "adaptive_offset": "lineart",
    "min_speck_area": "lineart",
    "binarize_threshold": "lineart",
    "initial_ball": "segmentation",
    "strokes": "segmentation",
    "hint": "selection",
    "saturation_delta": "saturation",
    "k_colors": "quantization",
    "seed": "quantization",
    "enable_shading": "shading",
})

# Table of permissible (enforced) and recommended ranges per tunable. The
# service exposes this verbatim so UIs share one source of truth.
PARAM_BOUNDS: Mapping[str, Mapping] = MappingProxyType({
    "blur_radius": MappingProxyType({
        "permissible": "> 0", "min": 1, "max": None, "recommended": (1, 2),
        "note": "enforced when screentone removal runs; 0 allowed otherwise"}),
    "initial_ball": MappingProxyType({
        "permissible": "> 1", "min": 2, "max": None, "recommended": (2, 5)}),
    "saturation_delta": MappingProxyType({
        "permissible": "< 255", "min": 0, "max": 254, "recommended": (10, 25)}),
    "k_colors": MappingProxyType({
        "permissible": "> 0", "min": 1, "max": None, "recommended": (5, 20),
        "nullable": True, "note": "typically best between 5 and 12; null disables"}),
})


@dataclass(frozen=True)
class PipelineParams:
    """Every tunable of the pipeline, with working defaults."""

    blur_radius: int = 1
    initial_ball: int = 3
    saturation_delta: int = 15
    k_colors: Optional[int] = None
    enable_shading: bool = True
    seed: int = 0
    adaptive_window: int = 15
    adaptive_offset: int = 10
    min_speck_area: int = 10
    binarize_threshold: int = 128

    def validate(self, removal_runs: bool = True) -> None:
        """Raise ParameterError naming the offending field and its range."""
        if removal_runs and self.blur_radius <= 0:
            raise ParameterError("blur_radius", self.blur_radius, "> 0")
        if self.blur_radius < 0:
            raise ParameterError("blur_radius", self.blur_radius, "> 0")
        if self.initial_ball <= 1:
            raise ParameterError("initial_ball", self.initial_ball, "> 1")
        if self.saturation_delta >= 255 or self.saturation_delta < 0:
            raise ParameterError("saturation_delta", self.saturation_delta, "< 255")
        if self.k_colors is not None and self.k_colors <= 0:
            raise ParameterError("k_colors", self.k_colors, "> 0")
        if self.adaptive_window < 3 or self.adaptive_window % 2 == 0:
            raise ParameterError("adaptive_window", self.adaptive_window, "odd and >= 3")
        if self.adaptive_offset < 0:
            raise ParameterError("adaptive_offset", self.adaptive_offset, ">= 0")
        if self.min_speck_area < 0:
            raise ParameterError("min_speck_area", self.min_speck_area, ">= 0")
        if not 0 <= self.binarize_threshold <= 255:
            raise ParameterError("binarize_threshold", self.binarize_threshold, "0 - 255")

    def lineart_params(self) -> LineartParams:
        return LineartParams(
            blur_radius=self.blur_radius,
            adaptive_window=self.adaptive_window,
            adaptive_offset=self.adaptive_offset,
            min_speck_area=self.min_speck_area,
        )


@dataclass(frozen=True)
class PipelineInput:
    """Everything the pipeline consumes.

    target_mono is the greyscale page; screentones declares whether it
    carries tone patterns (drives both screentone removal and shading).
    target_lineart, when given, bypasses screentone removal entirely
    (greyscale line art gets binarized first).
    """

    target_mono: GreyImage
    hint: ColorImage
    target_lineart: Union[BinaryImage, GreyImage, None] = None
    strokes: StrokeSet = StrokeSet()
    screentones: bool = True

    @property
    def removal_runs(self) -> bool:
        return self.screentones and self.target_lineart is None


@dataclass(frozen=True)
class StageOutputs:
    """Immutable snapshot of every stage product plus per-stage version counters.

    A stage's counter increases exactly when that stage was recomputed.
    """

    lineart: BinaryImage
    merged_lines: BinaryImage
    segmentation: SegmentMap
    palette: SegmentPalette
    selection: ColorImage
    saturation: ColorImage
    quantization: ColorImage
    shading: ColorImage
    final: ColorImage
    versions: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "versions", MappingProxyType(dict(self.versions)))

    def stage_image(self, name: str, viz_seed: int = 0):
        """The displayable raster for a stage name (labels render seeded)."""
        if name == "lineart":
            return self.lineart
        if name == "segmentation":
            return render_labels(self.segmentation, seed=viz_seed)
        if name in ("selection", "saturation", "quantization", "shading", "final"):
            return getattr(self, name)
        raise KeyError(name)


def hint_from_file(path: str) -> ColorImage:
    """Load a PNG/JPEG hint as RGB; greyscale files are promoted to RGB."""
    return load_color(path)


def _earliest_stage(changed: Iterable[str]) -> Optional[str]:
    best = None
    for key in changed:
        stage = PARAM_STAGE.get(key)
        if stage is None:
            raise ValueError(f"unknown parameter {key!r}; known: {sorted(PARAM_STAGE)}")
        idx = STAGES.index(stage)
        if best is None or idx < best:
            best = idx
    return None if best is None else STAGES[best]


def _compute(inp: PipelineInput, params: PipelineParams,
             cached: Optional[StageOutputs], start: str) -> StageOutputs:
    params.validate(removal_runs=inp.removal_runs)
    if inp.target_lineart is not None:
        la = inp.target_lineart
        if (la.width, la.height) != (inp.target_mono.width, inp.target_mono.height):
            raise DimensionError(
                f"lineart {la.width}x{la.height} vs target "
                f"{inp.target_mono.width}x{inp.target_mono.height}")
    start_idx = STAGES.index(start)
    versions = dict(cached.versions) if cached is not None else {s: 0 for s in STAGES}

    def runs(stage: str) -> bool:
        return STAGES.index(stage) >= start_idx

    if runs("lineart"):
        if inp.target_lineart is not None:
            la = inp.target_lineart
            lineart = binarize(la, params.binarize_threshold) if isinstance(la, GreyImage) else la
        elif inp.screentones:
            lineart = remove_screentone(inp.target_mono, params.lineart_params())
        else:
            lineart = binarize(inp.target_mono, params.binarize_threshold)
        versions["lineart"] += 1
    else:
        lineart = cached.lineart

    if runs("segmentation"):
        merged = merge_strokes(lineart, inp.strokes)
        seg = trapped_ball_segment(merged, BallSchedule(params.initial_ball))
        versions["segmentation"] += 1
    else:
        merged, seg = cached.merged_lines, cached.segmentation

    if runs("selection"):
        hint = resize_bilinear(inp.hint, inp.target_mono.width, inp.target_mono.height)
        selection, palette = select_segment_colors(seg, hint)
        versions["selection"] += 1
    else:
        selection, palette = cached.selection, cached.palette

    if runs("saturation"):
        saturation = increase_saturation(selection, params.saturation_delta, edges=merged)
        versions["saturation"] += 1
    else:
        saturation = cached.saturation

    if runs("quantization"):
        if params.k_colors is not None:
            quantization = quantize_colors(
                saturation,
                QuantizeParams(k=params.k_colors, seed=params.seed),
                edges=merged)
        else:
            quantization = saturation
        versions["quantization"] += 1
    else:
        quantization = cached.quantization

    if runs("shading"):
        if params.enable_shading and inp.screentones:
            shading = apply_shading(
                quantization, inp.target_mono,
                ShadeParams(shade_radius=params.blur_radius + 2))
        else:
            shading = quantization
        versions["shading"] += 1
    else:
        shading = cached.shading

    final = composite_lines(shading, merged)
    versions["final"] += 1

    return StageOutputs(
        lineart=lineart, merged_lines=merged, segmentation=seg, palette=palette,
        selection=selection, saturation=saturation, quantization=quantization,
        shading=shading, final=final, versions=versions)


def run(inp: PipelineInput, params: PipelineParams) -> StageOutputs:
    """Execute every stage from scratch."""
    return _compute(inp, params, None, "lineart")


def rerun_from(outputs: StageOutputs, inp: PipelineInput, params: PipelineParams,
               changed: Iterable[str]) -> StageOutputs:
    """Recompute only the stages affected by the changed parameter names.

    ``outputs`` must come from a prior run on the same input with parameters
    that differ only in ``changed``. Keys are PipelineParams field names plus
    "target", "lineart", "hint", "strokes", "screentones". An empty change
    set returns ``outputs`` untouched.
    """
    start = _earliest_stage(changed)
    if start is None:
        return outputs
    return _compute(inp, params, outputs, start)


def dump_stages(outputs: StageOutputs, directory: str, viz_seed: int = 0) -> list[str]:
    """Write every stage as <directory>/<stage>.png; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in STAGES:
        path = os.path.join(directory, f"{name}.png")
        save_image(outputs.stage_image(name, viz_seed=viz_seed), path)
        paths.append(path)
    return paths
