"""Per-image tensor export: logits and features at label resolution.

The segmentation network ships as a TorchScript archive so its architecture
lives inside the weights file, not here. The loaded module must map a
``1 x 3 x H x W`` float image in [0, 1] to a ``(logits, features)`` pair of
``1 x C x h x w`` / ``1 x N x h' x w'`` tensors; both are resampled
bilinearly to the paired mask's resolution before writing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import AssetError, FormatError, IoError
from .text_export import write_npy

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".webp")
MASK_VALUES = (0, 1, 255)


class TorchScriptSegmenter:
    """A frozen segmentation model loaded from a TorchScript file."""

    def __init__(self, weights: str, device: str = "cpu"):
        path = Path(weights)
        if not path.is_file():
            raise AssetError(f"model weights {path} do not exist")
        import torch

        self._torch = torch
        self._device = device
        try:
            self._model = torch.jit.load(str(path), map_location=device)
        except (RuntimeError, ValueError) as exc:
            raise AssetError(f"cannot load TorchScript model {path}: {exc}") from exc
        self._model.eval()

    def __call__(self, image: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(3, H, W) float32 in [0, 1] -> (C, h, w) logits, (N, h', w') features."""
        torch = self._torch
        with torch.no_grad():
            batch = torch.from_numpy(image[None]).to(self._device)
            out = self._model(batch)
        if not (isinstance(out, (tuple, list)) and len(out) == 2):
            raise FormatError("model must return a (logits, features) pair")
        logits, feats = (t.detach().cpu() for t in out)
        if logits.ndim != 4 or feats.ndim != 4:
            raise FormatError(
                f"model outputs must be 4-D, got {tuple(logits.shape)} "
                f"and {tuple(feats.shape)}")
        return logits, feats


def _resample(tensor, height: int, width: int) -> np.ndarray:
    import torch.nn.functional as F

    out = F.interpolate(tensor, size=(height, width), mode="bilinear",
                        align_corners=False)
    return out[0].numpy().astype(np.float32)


def load_image(path) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    except OSError as exc:
        raise IoError(f"cannot read image {path}: {exc}") from exc
    return np.moveaxis(rgb, -1, 0).copy()


def load_mask(path, mask_map: Optional[Dict[int, int]] = None) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".npy":
        try:
            raw = np.load(path, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise FormatError(f"cannot read mask {path}: {exc}") from exc
    else:
        from PIL import Image

        try:
            with Image.open(path) as img:
                if img.mode not in ("L", "P"):
                    raise FormatError(
                        f"{path}: mask must be 8-bit grayscale, got {img.mode}")
                raw = np.asarray(img)
        except OSError as exc:
            raise IoError(f"cannot read mask {path}: {exc}") from exc
    if raw.ndim != 2:
        raise FormatError(f"{path}: mask must be 2-D, got shape {raw.shape}")
    mask = raw.astype(np.int64)
    if mask_map:
        remapped = np.full_like(mask, -1)
        for src, dst in mask_map.items():
            remapped[mask == src] = dst
        if (remapped < 0).any():
            leftovers = sorted(np.unique(mask[remapped < 0]).tolist())
            raise FormatError(f"{path}: values {leftovers} missing from mask map")
        mask = remapped
    if not np.isin(mask, MASK_VALUES).all():
        bad = sorted(set(np.unique(mask).tolist()) - set(MASK_VALUES))
        raise FormatError(f"{path}: mask holds values {bad}; pass a mask map")
    return mask.astype(np.uint8)


def find_images(images_dir) -> List[Path]:
    images_dir = Path(images_dir)
    if not images_dir.is_dir():
        raise AssetError(f"image directory {images_dir} does not exist")
    found = sorted(p for p in images_dir.iterdir()
                   if p.suffix.lower() in IMAGE_SUFFIXES)
    if not found:
        raise AssetError(f"no images under {images_dir}")
    return found


def _mask_for(stem: str, masks_dir: Optional[Path]) -> Optional[Path]:
    if masks_dir is None:
        return None
    for suffix in (".png", ".npy"):
        candidate = masks_dir / f"{stem}{suffix}"
        if candidate.is_file():
            return candidate
    raise AssetError(f"no mask for image {stem!r} under {masks_dir}")


@dataclass(frozen=True)
class ExportedRecord:
    image_id: str
    logits: Path
    feature: Path
    mask: Path


def export_image_tensors(model: TorchScriptSegmenter, images: Sequence,
                         out_root, masks_dir=None,
                         mask_map: Optional[Dict[int, int]] = None,
                         embeddings_name: str = "text_embeddings.npy",
                         ) -> List[ExportedRecord]:
    """Run the model over every image and write the engine dataset layout.

    Without a mask directory each record gets an all-255 (fully ignored)
    mask at the model's output resolution, keeping the manifest loadable;
    evaluation then needs real ground truth.
    """
    out_root = Path(out_root)
    masks_dir = Path(masks_dir) if masks_dir is not None else None
    for sub in ("logits", "features", "masks"):
        (out_root / sub).mkdir(parents=True, exist_ok=True)

    records = []
    for image_path in images:
        image_path = Path(image_path)
        stem = image_path.stem
        mask_path = _mask_for(stem, masks_dir)
        logits, feats = model(load_image(image_path))
        if mask_path is not None:
            mask = load_mask(mask_path, mask_map)
        else:
            mask = np.full(tuple(logits.shape[2:]), 255, dtype=np.uint8)
        height, width = mask.shape
        rec = ExportedRecord(
            image_id=stem,
            logits=write_npy(_resample(logits, height, width),
                             out_root / "logits" / f"{stem}.npy"),
            feature=write_npy(_resample(feats, height, width),
                              out_root / "features" / f"{stem}.npy"),
            mask=write_npy(mask, out_root / "masks" / f"{stem}.npy"),
        )
        records.append(rec)

    payload = {
        "embeddings": embeddings_name,
        "records": [
            {
                "image_id": r.image_id,
                "logits": r.logits.relative_to(out_root).as_posix(),
                "mask": r.mask.relative_to(out_root).as_posix(),
                "feature": r.feature.relative_to(out_root).as_posix(),
            }
            for r in records
        ],
    }
    (out_root / "manifest.json").write_text(json.dumps(payload, indent=2) + "\n")
    return records
