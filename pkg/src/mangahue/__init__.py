"""Semi-automatic manga colorization.

Segments line art with a trapped-ball pass so colors stay inside gappy
outlines, fills segments from a rough color hint, then optionally boosts
saturation, quantizes the palette, and re-shades from the original page.
"""

from .colorops import (
    QuantizeParams,
    SegmentPalette,
    ShadeParams,
    apply_shading,
    composite_lines,
    increase_saturation,
    quantize_colors,
    render_palette,
    select_segment_colors,
)
from .errors import BoundsError, DimensionError, MangahueError, ParameterError
from .lineart import LineartParams, binarize, despeckle, remove_screentone
from .pipeline import (
    PARAM_BOUNDS,
    PARAM_STAGE,
    STAGES,
    PipelineInput,
    PipelineParams,
    StageOutputs,
    dump_stages,
    hint_from_file,
    rerun_from,
    run,
)
from .raster import (
    BinaryImage,
    ColorImage,
    GreyImage,
    Hsv,
    gaussian_blur,
    hsv_to_rgb,
    load_color,
    load_grey,
    resize_bilinear,
    rgb_to_hsv,
    save_image,
    to_grey,
)
from .segment import (
    BallSchedule,
    SegmentMap,
    SegmentRecord,
    Stroke,
    StrokeSet,
    connected_components,
    erode,
    geodesic_dilate,
    merge_strokes,
    render_labels,
    segment_map_from_json,
    segment_map_to_json,
    segment_stats,
    trapped_ball_segment,
)

__version__ = "0.1.0"

__all__ = [
    "BallSchedule", "BinaryImage", "BoundsError", "ColorImage", "DimensionError",
    "GreyImage", "Hsv", "LineartParams", "MangahueError", "PARAM_BOUNDS",
    "PARAM_STAGE", "ParameterError", "PipelineInput", "PipelineParams",
    "QuantizeParams", "STAGES", "SegmentMap", "SegmentPalette", "SegmentRecord",
    "ShadeParams", "StageOutputs", "Stroke", "StrokeSet", "apply_shading",
    "binarize", "composite_lines", "connected_components", "despeckle",
    "dump_stages", "erode", "gaussian_blur", "geodesic_dilate", "hint_from_file",
    "hsv_to_rgb", "increase_saturation", "load_color", "load_grey",
    "merge_strokes", "quantize_colors", "remove_screentone", "render_labels",
    "render_palette", "rerun_from", "resize_bilinear", "rgb_to_hsv", "run",
    "save_image", "segment_map_from_json", "segment_map_to_json",
    "segment_stats", "to_grey", "trapped_ball_segment",
]
