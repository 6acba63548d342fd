"""Command line: train on one pair, infer hints from a checkpoint."""

from __future__ import annotations

import argparse
import json
import sys

from mangahue.raster import load_color, load_grey, save_image

from .data import crops_from_obj, make_training_pair, TrainingPair
from .errors import CganHintError, ConfigError
from .infer import infer_file
from .train import TrainConfig, train


def _load_crops(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read crops {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"crops {path} is not valid JSON: {exc}") from exc
    return crops_from_obj(obj)


def _cmd_train(args) -> int:
    color = load_color(args.color)
    crops = _load_crops(args.crops) if args.crops else ()
    if args.mono:
        pair = TrainingPair(load_grey(args.mono), color, crops)
    else:
        pair = make_training_pair(color, args.mode, crops)
    cfg = TrainConfig(iterations=args.iterations, resolution=args.resolution,
                      seed=args.seed, checkpoint_interval=args.checkpoint_interval)
    result = train(pair, cfg, out_dir=args.out)
    last_l1 = result.log[-1][1]
    print(f"trained {cfg.iterations} iterations; final L1 {last_l1:.4f}; "
          f"model written to {args.out}")
    return 0


def _cmd_infer(args) -> int:
    hint = infer_file(args.model, load_grey(args.target))
    save_image(hint, args.out)
    print(f"hint written to {args.out} ({hint.width}x{hint.height})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cganhint",
        description="Train a one-pair colorization model and paint hint images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit the model to a single image pair")
    p.add_argument("--color", required=True, help="colorized training page (PNG/JPEG)")
    p.add_argument("--mono", help="matching mono page; derived from --color if absent")
    p.add_argument("--mode", choices=("greyscale", "lineart"), default="greyscale",
                   help="how to derive the mono side when --mono is absent")
    p.add_argument("--crops", metavar="JSON",
                   help="file holding a JSON list of {x, y, width, height} crops")
    p.add_argument("--out", required=True, help="output directory for model + losses.csv")
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--resolution", type=int, default=256,
                   help="working resolution, a multiple of 16 (default 256)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint-interval", type=int, default=100)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("infer", help="paint a hint for a mono page")
    p.add_argument("--model", required=True, help="checkpoint file or training output dir")
    p.add_argument("--target", required=True, help="mono page to colorize")
    p.add_argument("--out", required=True, help="hint PNG path")
    p.set_defaults(func=_cmd_infer)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CganHintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def app() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    app()
