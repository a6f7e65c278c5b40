"""Command-line surface.

Subcommands: score (write per-image score maps), eval (pooled metrics),
render (heatmaps), synth (synthetic fixtures), defaults (per-dataset
presets). Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import EvalConfig, write_dataset_presets
from .errors import (ConfigError, DegenerateError, FormatError, IoError,
                     ShapeError, ValidationError)
from .heatmap import render_heatmap
from .manifest import DatasetManifest
from .runner import run_eval, score_dataset
from .scores import SCORE_METHODS
from .synth import FixtureSpec, synth_fixture
from .tensors import load_tensor

CONFIG_EXIT = 2
DATA_EXIT = 3


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file (flags override it)")
    p.add_argument("--method", choices=SCORE_METHODS)
    p.add_argument("--alpha", type=float, help="fusion weight on the model logits")
    p.add_argument("--w", type=float, help="ensemble weight on the fused score")
    p.add_argument("--temperature", type=float, help="odin softmax temperature")
    p.add_argument("--projection", choices=("raw", "cosine"))
    p.add_argument("--scale", type=float, help="cosine projection scale")


def _build_config(args, need_dataset: bool = True) -> EvalConfig:
    cfg = EvalConfig.from_file(args.config) if args.config else EvalConfig()
    cfg = cfg.override(
        method=args.method,
        alpha=args.alpha,
        w=args.w,
        odin_temperature=args.temperature,
        projection=args.projection,
        scale=args.scale,
        bins=getattr(args, "bins", None),
        jobs=getattr(args, "jobs", None),
        exact=True if getattr(args, "exact", False) else None,
        dataset_root=args.dataset,
        output_dir=getattr(args, "out", None),
    )
    if need_dataset:
        if cfg.dataset_root is None:
            raise ConfigError("no dataset given (use --dataset or a config file)")
        if not Path(cfg.dataset_root).exists():
            raise ConfigError(f"dataset root {cfg.dataset_root} does not exist")
    return cfg


def _cmd_eval(args) -> int:
    cfg = _build_config(args)
    manifest = DatasetManifest.load(cfg.dataset_root)
    report = run_eval(manifest, cfg)
    row = report.row(method=cfg.method,
                     dataset=cfg.dataset or Path(cfg.dataset_root).name,
                     bins=None if cfg.exact else cfg.bins,
                     pooling="pooled")
    print(json.dumps(row, indent=2))
    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(row, indent=2) + "\n")
        with open(out / "report.csv", "w", newline="") as fp:
            writer = csv.DictWriter(fp, fieldnames=list(row))
            writer.writeheader()
            writer.writerow(row)
    return 0


def _cmd_score(args) -> int:
    cfg = _build_config(args)
    if cfg.output_dir is None:
        raise ConfigError("score needs --out for the score maps")
    manifest = DatasetManifest.load(cfg.dataset_root)
    written = score_dataset(manifest, cfg, cfg.output_dir)
    print(f"wrote {len(written)} score maps to {cfg.output_dir}")
    return 0


def _cmd_render(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for score_path in args.scores:
        smap = load_tensor(score_path, "score")
        target = out / (Path(score_path).stem + ".png")
        render_heatmap(smap, target)
        print(f"rendered {target}")
    return 0


def _cmd_synth(args) -> int:
    spec = FixtureSpec(images=args.images, height=args.height, width=args.width,
                       classes=args.classes, embed_dim=args.embed_dim,
                       anomaly_fraction=args.anomaly_fraction,
                       separation=args.separation)
    manifest = synth_fixture(args.seed, spec, args.out)
    print(f"wrote {len(manifest.records)} images under {manifest.root}")
    return 0


def _cmd_defaults(args) -> int:
    written = write_dataset_presets(args.out)
    for key, path in written.items():
        print(f"{key}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anomseg",
        description="Pixel-level anomaly scoring and evaluation over exported tensors")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="run pooled metrics over a dataset")
    _add_method_flags(p_eval)
    p_eval.add_argument("--dataset", type=Path, help="dataset root with manifest.json")
    p_eval.add_argument("--bins", type=int, help="histogram bins (binned path)")
    p_eval.add_argument("--exact", action="store_true",
                        help="use the exact sort-based metrics instead of binning")
    p_eval.add_argument("--jobs", type=int, help="worker threads")
    p_eval.add_argument("--out", type=Path, help="directory for report.json/csv")
    p_eval.set_defaults(func=_cmd_eval)

    p_score = sub.add_parser("score", help="write per-image score maps")
    _add_method_flags(p_score)
    p_score.add_argument("--dataset", type=Path, help="dataset root with manifest.json")
    p_score.add_argument("--out", type=Path, help="directory for <id>.npy score maps")
    p_score.set_defaults(func=_cmd_score)

    p_render = sub.add_parser("render", help="render score maps as PNG heatmaps")
    p_render.add_argument("scores", nargs="+", type=Path, help="score-map .npy files")
    p_render.add_argument("--out", type=Path, required=True)
    p_render.set_defaults(func=_cmd_render)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--out", type=Path, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--images", type=int, default=20)
    p_synth.add_argument("--height", type=int, default=256)
    p_synth.add_argument("--width", type=int, default=256)
    p_synth.add_argument("--classes", type=int, default=19)
    p_synth.add_argument("--embed-dim", type=int, default=64)
    p_synth.add_argument("--anomaly-fraction", type=float, default=0.08)
    p_synth.add_argument("--separation", type=float, default=8.0)
    p_synth.set_defaults(func=_cmd_synth)

    p_defaults = sub.add_parser("defaults", help="emit per-dataset preset configs")
    p_defaults.add_argument("--out", type=Path, required=True)
    p_defaults.set_defaults(func=_cmd_defaults)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except (FormatError, ValidationError, ShapeError, DegenerateError, IoError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_EXIT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
