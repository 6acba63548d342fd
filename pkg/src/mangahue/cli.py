"""Command line interface.

Exit codes: 0 success, 2 argument/validation problems (the message names the
flag and its permissible range), 1 processing or I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .colorops import QuantizeParams, quantize_colors
from .errors import MangahueError, ParameterError
from .lineart import remove_screentone
from .pipeline import PipelineInput, PipelineParams, dump_stages, run
from .raster import load_color, load_grey, save_image
from .segment import (
    BallSchedule,
    StrokeSet,
    merge_strokes,
    render_labels,
    segment_map_to_json,
    trapped_ball_segment,
)

FLAG_NAMES = {
    "blur_radius": "--blur",
    "initial_ball": "--ball",
    "saturation_delta": "--saturation",
    "k_colors": "--colors",
    "seed": "--seed",
    "adaptive_window": "--adaptive-window",
    "adaptive_offset": "--adaptive-offset",
    "min_speck_area": "--min-speck",
    "binarize_threshold": "--binarize-threshold",
}

_CONFIG_KEYS = set(FLAG_NAMES) | {"enable_shading", "screentones"}


def _add_tunables(p: argparse.ArgumentParser, full: bool) -> None:
    p.add_argument("--blur", type=int, default=None, dest="blur_radius", metavar="N",
                   help="line extraction blur radius; permissible > 0 when "
                        "screentones are removed (recommended 1-2)")
    p.add_argument("--adaptive-window", type=int, default=None, dest="adaptive_window",
                   metavar="N", help="local threshold window, odd and >= 3 (default 15)")
    p.add_argument("--adaptive-offset", type=int, default=None, dest="adaptive_offset",
                   metavar="N", help="ink must be this much darker than the local mean (default 10)")
    p.add_argument("--min-speck", type=int, default=None, dest="min_speck_area",
                   metavar="N", help="drop ink islands smaller than this many pixels (default 10)")
    p.add_argument("--binarize-threshold", type=int, default=None, dest="binarize_threshold",
                   metavar="N", help="ink threshold for supplied/clean line art (default 128)")
    if full:
        p.add_argument("--ball", type=int, default=None, dest="initial_ball", metavar="N",
                       help="starting trapped-ball diameter; permissible > 1 (recommended 2-5)")
        p.add_argument("--saturation", type=int, default=None, dest="saturation_delta",
                       metavar="N", help="saturation increase; permissible < 255 (recommended 10-25)")
        p.add_argument("--colors", type=int, default=None, dest="k_colors", metavar="K",
                       help="quantized palette size; permissible > 0 (recommended 5-20, "
                            "typically best 5-12); omit to skip quantization")
        p.add_argument("--no-shading", action="store_true",
                       help="skip shading even when the target has screentones")
        p.add_argument("--seed", type=int, default=None, dest="seed", metavar="N",
                       help="random seed for quantization (default 0)")
    p.add_argument("--config", metavar="PATH",
                   help="JSON file of parameter defaults; explicit flags win")


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise MangahueError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MangahueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError("config", cfg, "a JSON object of parameter names")
    for key in cfg:
        if key not in _CONFIG_KEYS:
            raise ParameterError(key, cfg[key], f"one of {sorted(_CONFIG_KEYS)}")
    return cfg


def _merge_params(args: argparse.Namespace, cfg: dict) -> PipelineParams:
    defaults = PipelineParams()

    def pick(name: str):
        explicit = getattr(args, name, None)
        if explicit is not None:
            return explicit
        if name in cfg:
            return cfg[name]
        return getattr(defaults, name)

    enable_shading = not getattr(args, "no_shading", False)
    if getattr(args, "no_shading", False) is False and "enable_shading" in cfg:
        enable_shading = bool(cfg["enable_shading"])
    return PipelineParams(
        blur_radius=pick("blur_radius"),
        initial_ball=pick("initial_ball"),
        saturation_delta=pick("saturation_delta"),
        k_colors=pick("k_colors"),
        enable_shading=enable_shading,
        seed=pick("seed"),
        adaptive_window=pick("adaptive_window"),
        adaptive_offset=pick("adaptive_offset"),
        min_speck_area=pick("min_speck_area"),
        binarize_threshold=pick("binarize_threshold"),
    )


def _screentones(args: argparse.Namespace, cfg: dict) -> bool:
    if getattr(args, "no_screentones", False):
        return False
    if "screentones" in cfg:
        return bool(cfg["screentones"])
    return True


def _load_strokes(path: Optional[str]) -> StrokeSet:
    if not path:
        return StrokeSet()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise MangahueError(f"cannot read strokes {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MangahueError(f"strokes {path} is not valid JSON: {exc}") from exc
    try:
        return StrokeSet.from_obj(obj)
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise MangahueError(f"bad strokes file {path}: {exc}") from exc


def _extract_lineart(target, args, params, screentones):
    if getattr(args, "lineart", None):
        from .lineart import binarize
        grey = load_grey(args.lineart)
        if (grey.width, grey.height) != (target.width, target.height):
            raise MangahueError(
                f"lineart is {grey.width}x{grey.height} but target is "
                f"{target.width}x{target.height}")
        return binarize(grey, params.binarize_threshold)
    if screentones:
        return remove_screentone(target, params.lineart_params())
    from .lineart import binarize
    return binarize(target, params.binarize_threshold)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_colorize(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    params = _merge_params(args, cfg)
    screentones = _screentones(args, cfg)
    lineart_supplied = bool(args.lineart)
    params.validate(removal_runs=screentones and not lineart_supplied)

    target = load_grey(args.target)
    hint = load_color(args.hint)
    lineart = None
    if lineart_supplied:
        from .lineart import binarize
        grey = load_grey(args.lineart)
        lineart = binarize(grey, params.binarize_threshold)
    inp = PipelineInput(
        target_mono=target, hint=hint, target_lineart=lineart,
        strokes=_load_strokes(args.strokes), screentones=screentones)
    outputs = run(inp, params)
    save_image(outputs.final, args.output)
    if args.dump_stages:
        dump_stages(outputs, args.dump_stages, viz_seed=params.seed)
    if args.palette_out:
        try:
            with open(args.palette_out, "w", encoding="utf-8") as fh:
                fh.write(outputs.palette.to_json())
        except OSError as exc:
            raise MangahueError(f"cannot write palette {args.palette_out}: {exc}") from exc
    return 0


def _cmd_lineart(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    params = _merge_params(args, cfg)
    params.validate(removal_runs=True)
    target = load_grey(args.target)
    mask = remove_screentone(target, params.lineart_params())
    save_image(mask, args.output)
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    params = _merge_params(args, cfg)
    screentones = _screentones(args, cfg)
    lineart_supplied = bool(args.lineart)
    params.validate(removal_runs=screentones and not lineart_supplied)
    target = load_grey(args.target)
    lines = _extract_lineart(target, args, params, screentones)
    merged = merge_strokes(lines, _load_strokes(args.strokes))
    seg = trapped_ball_segment(merged, BallSchedule(params.initial_ball))
    save_image(render_labels(seg, seed=params.seed), args.output)
    if args.sidecar:
        try:
            with open(args.sidecar, "w", encoding="utf-8") as fh:
                fh.write(segment_map_to_json(seg))
        except OSError as exc:
            raise MangahueError(f"cannot write sidecar {args.sidecar}: {exc}") from exc
    return 0


def _cmd_quantize(args: argparse.Namespace) -> int:
    qp = QuantizeParams(k=args.k_colors, seed=args.seed or 0)
    image = load_color(args.input)
    save_image(quantize_colors(image, qp), args.output)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app, default_addr, default_max_sessions

    addr = args.addr or default_addr()
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ParameterError("--addr", addr, "host:port")
    max_sessions = args.max_sessions or default_max_sessions()
    app = create_app(max_sessions=max_sessions)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mangahue",
        description="Colorize manga pages from a rough color hint.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("colorize", help="run the full pipeline on one page")
    p.add_argument("--target", required=True, metavar="PNG", help="greyscale page")
    p.add_argument("--hint", required=True, metavar="PNG", help="rough color hint (any size)")
    p.add_argument("--lineart", metavar="PNG", help="use this line art instead of extracting it")
    p.add_argument("--strokes", metavar="JSON",
                   help="gap-closing strokes: [{\"width\": 2, \"points\": [[x, y], ...]}, ...]")
    p.add_argument("--no-screentones", action="store_true",
                   help="target is clean line art: skip screentone removal and shading")
    p.add_argument("-o", "--output", required=True, metavar="PNG")
    p.add_argument("--dump-stages", metavar="DIR", help="also write every stage image here")
    p.add_argument("--palette-out", metavar="JSON", help="write the selected palette here")
    _add_tunables(p, full=True)
    p.set_defaults(func=_cmd_colorize)

    p = sub.add_parser("lineart", help="extract line art from a screentoned page")
    p.add_argument("--target", required=True, metavar="PNG")
    p.add_argument("-o", "--output", required=True, metavar="PNG")
    _add_tunables(p, full=False)
    p.set_defaults(func=_cmd_lineart)

    p = sub.add_parser("segment", help="trapped-ball segment a page and visualize the regions")
    p.add_argument("--target", required=True, metavar="PNG")
    p.add_argument("--lineart", metavar="PNG", help="use this line art instead of extracting it")
    p.add_argument("--strokes", metavar="JSON")
    p.add_argument("--no-screentones", action="store_true")
    p.add_argument("--ball", type=int, default=None, dest="initial_ball", metavar="N",
                   help="starting trapped-ball diameter; permissible > 1 (recommended 2-5)")
    p.add_argument("--seed", type=int, default=None, help="seed for the label colors")
    p.add_argument("-o", "--output", required=True, metavar="PNG", help="label visualization")
    p.add_argument("--sidecar", metavar="JSON", help="write the run-length label grid here")
    _add_tunables(p, full=False)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("quantize", help="reduce an image to at most K flat colors")
    p.add_argument("--input", required=True, metavar="PNG")
    p.add_argument("--colors", type=int, required=True, dest="k_colors", metavar="K",
                   help="palette size; permissible > 0 (recommended 5-20, typically best 5-12)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, metavar="PNG")
    p.set_defaults(func=_cmd_quantize)

    p = sub.add_parser("serve", help="start the interactive tuning service")
    p.add_argument("--addr", metavar="HOST:PORT",
                   help="bind address (default env MANGAHUE_ADDR or 127.0.0.1:8765)")
    p.add_argument("--max-sessions", type=int, default=None, metavar="N",
                   help="session cap before LRU eviction (default env MANGAHUE_MAX_SESSIONS or 16)")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParameterError as exc:
        flag = FLAG_NAMES.get(exc.field, exc.field)
        print(f"error: {flag}: permissible range is {exc.permissible} (got {exc.value})",
              file=sys.stderr)
        return 2
    except MangahueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def app() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    app()
