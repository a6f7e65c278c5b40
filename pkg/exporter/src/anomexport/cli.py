"""Exporter command line.

``anomexport export`` produces the full engine dataset layout: text
embeddings from a CLIP checkpoint plus per-image logits/features/masks from
a TorchScript segmentation model. Exit codes: 0 success, 2 bad invocation,
3 missing assets or bad data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .encoders import ClipTextEncoder
from .errors import AssetError, ExportError
from .image_export import TorchScriptSegmenter, export_image_tensors, find_images
from .prompts import PromptSet, load_class_names
from .text_export import export_text_embeddings


def parse_mask_map(spec: str):
    mapping = {}
    try:
        for pair in spec.split(","):
            src, dst = pair.split(":")
            mapping[int(src)] = int(dst)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"mask map must look like '0:0,2:1,255:255', got {spec!r}") from exc
    return mapping


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anomexport",
        description="Export segmentation tensors into the anomseg layout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="export embeddings + per-image tensors")
    p.add_argument("--weights", required=True,
                   help="TorchScript segmentation model (.ts/.pt)")
    p.add_argument("--clip", required=True,
                   help="local CLIP text-encoder checkpoint directory")
    p.add_argument("--images", required=True, help="directory of input frames")
    p.add_argument("--classes", required=True,
                   help="text file with one in-distribution class name per line")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--masks", help="directory of ground-truth masks "
                                   "(<image stem>.png|.npy); omit for all-ignore")
    p.add_argument("--mask-map", type=parse_mask_map,
                   help="remap mask values, e.g. '0:0,2:1,255:255'")
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=_cmd_export)
    return parser


def _cmd_export(args) -> int:
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    prompts = PromptSet.for_classes(load_class_names(args.classes))
    encoder = ClipTextEncoder(args.clip, device=args.device)
    matrix = export_text_embeddings(prompts, encoder,
                                    out_root / "text_embeddings.npy")
    print(f"text embeddings: {matrix.shape[0]} classes x {matrix.shape[1]} dims")

    model = TorchScriptSegmenter(args.weights, device=args.device)
    records = export_image_tensors(model, find_images(args.images), out_root,
                                   masks_dir=args.masks, mask_map=args.mask_map)
    print(f"exported {len(records)} images to {out_root}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AssetError as exc:
        print(f"asset error: {exc}", file=sys.stderr)
        return 3
    except ExportError as exc:
        print(f"export error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
