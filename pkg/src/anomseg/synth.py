"""Synthetic desk-scale datasets with known separability.

Each generated image has:

* a 2-pixel ignore border (every image exercises the 255 path),
* one rectangular anomaly region whose model logits are flat noise,
* a small "confuser" rectangle of inlier pixels whose model logits are
  just as flat — but whose features still point at their true class, so
  text fusion can rescue them,
* everywhere else a dominant random class with a logit gap of
  ``separation`` over flat noise.

Features of inlier pixels are their class embedding times a random gain
plus small isotropic noise (cosine projection agrees with the class);
anomaly-pixel features are pure isotropic noise. Generation is driven by a
single seeded generator in fixed order, so a given seed reproduces every
file byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .manifest import DatasetManifest, ManifestRecord
from .tensors import EmbeddingMatrix, FeatureMap, LabelMask, LogitsMap, save_tensor

IGNORE_BORDER = 2
CONFUSER_FRACTION = 0.008
FEATURE_NOISE = 0.02
LOGIT_NOISE = 0.25


@dataclass(frozen=True)
class FixtureSpec:
    images: int = 20
    height: int = 256
    width: int = 256
    classes: int = 19
    embed_dim: int = 64
    anomaly_fraction: float = 0.08
    separation: float = 8.0

    def __post_init__(self):
        if min(self.images, self.height, self.width, self.embed_dim) < 1:
            raise ConfigError("fixture dims must all be >= 1")
        if self.classes < 2:
            raise ConfigError(f"need at least 2 classes, got {self.classes}")
        if not 0.0 < self.anomaly_fraction < 1.0:
            raise ConfigError(
                f"anomaly_fraction must lie in (0, 1), got {self.anomaly_fraction}")
        if self.separation < 0:
            raise ConfigError(f"separation must be >= 0, got {self.separation}")
        interior = (self.height - 2 * IGNORE_BORDER, self.width - 2 * IGNORE_BORDER)
        if min(interior) < 4:
            raise ConfigError(
                f"image {self.height}x{self.width} too small for a "
                f"{IGNORE_BORDER}px ignore border plus regions")


def _place_rect(rng: np.random.Generator, height: int, width: int, fraction: float):
    """Random rectangle of ~fraction of the image area inside the border."""
    y0, x0 = IGNORE_BORDER, IGNORE_BORDER
    y1, x1 = height - IGNORE_BORDER, width - IGNORE_BORDER
    area = fraction * height * width
    aspect = rng.uniform(0.5, 2.0)
    rh = max(2, min(y1 - y0, int(round(np.sqrt(area * aspect)))))
    rw = max(2, min(x1 - x0, int(round(area / rh))))
    ry = int(rng.integers(y0, y1 - rh + 1))
    rx = int(rng.integers(x0, x1 - rw + 1))
    return ry, rx, rh, rw


def _disjoint_rect(rng, height, width, fraction, taken):
    """Like _place_rect but avoiding an existing rectangle."""
    ty, tx, th, tw = taken
    for _ in range(200):
        ry, rx, rh, rw = _place_rect(rng, height, width, fraction)
        if ry + rh <= ty or ty + th <= ry or rx + rw <= tx or tx + tw <= rx:
            return ry, rx, rh, rw
    # dense layouts: fall back to a slice of whatever row band is free
    return IGNORE_BORDER, IGNORE_BORDER, 2, 2


def synth_fixture(seed: int, spec: FixtureSpec, out_root) -> DatasetManifest:
    """Write a complete dataset under out_root and return its manifest."""
    rng = np.random.default_rng(seed)
    out_root = Path(out_root)
    for sub in ("logits", "features", "masks"):
        (out_root / sub).mkdir(parents=True, exist_ok=True)

    nclass, ndim = spec.classes, spec.embed_dim
    height, width = spec.height, spec.width

    emb = rng.standard_normal((nclass, ndim))
    emb /= np.linalg.norm(emb, axis=1, keepdims=True)
    emb_path = out_root / "text_embeddings.npy"
    save_tensor(EmbeddingMatrix(emb.astype(np.float32)), emb_path)

    records = []
    for i in range(spec.images):
        image_id = f"img_{i:04d}"

        mask = np.zeros((height, width), dtype=np.uint8)
        mask[:IGNORE_BORDER, :] = 255
        mask[-IGNORE_BORDER:, :] = 255
        mask[:, :IGNORE_BORDER] = 255
        mask[:, -IGNORE_BORDER:] = 255
        ay, ax, ah, aw = _place_rect(rng, height, width, spec.anomaly_fraction)
        mask[ay:ay + ah, ax:ax + aw] = 1
        cy, cx, ch, cw = _disjoint_rect(rng, height, width, CONFUSER_FRACTION,
                                        (ay, ax, ah, aw))

        anomalous = np.zeros((height, width), dtype=bool)
        anomalous[ay:ay + ah, ax:ax + aw] = True
        confuser = np.zeros((height, width), dtype=bool)
        confuser[cy:cy + ch, cx:cx + cw] = True
        confident = ~(anomalous | confuser)

        class_map = rng.integers(0, nclass, size=(height, width))
        logits = LOGIT_NOISE * rng.standard_normal((nclass, height, width))
        ys, xs = np.nonzero(confident)
        logits[class_map[ys, xs], ys, xs] += spec.separation

        gain = rng.uniform(1.0, 2.0, size=(height, width))
        feats = emb[class_map].astype(np.float64) * gain[..., None]
        feats += FEATURE_NOISE * rng.standard_normal((height, width, ndim))
        feats[anomalous] = rng.standard_normal((int(anomalous.sum()), ndim))

        logits_path = out_root / "logits" / f"{image_id}.npy"
        feature_path = out_root / "features" / f"{image_id}.npy"
        mask_path = out_root / "masks" / f"{image_id}.npy"
        save_tensor(LogitsMap(logits.astype(np.float32)), logits_path)
        save_tensor(FeatureMap(np.moveaxis(feats, -1, 0).astype(np.float32)),
                    feature_path)
        save_tensor(LabelMask(mask), mask_path)
        records.append(ManifestRecord(image_id=image_id, logits=logits_path,
                                      mask=mask_path, feature=feature_path))

    manifest = DatasetManifest(root=out_root, records=tuple(records),
                               embeddings=emb_path)
    manifest.save()
    return manifest
