"""Text enhancement: project features through text embeddings, fuse with logits.

The embedding matrix acts as the weight of a 1x1 convolutional segmentation
head over the feature volume. Two projection readings are provided: ``raw``
(plain inner product per pixel) and ``cosine`` (both sides unit-normalized
over the embedding axis, then scaled), the latter being the default because
raw inner products and model logits live on incomparable scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .tensors import EmbeddingMatrix, FeatureMap, LogitsMap

PROJECTION_MODES = ("raw", "cosine")


@dataclass(frozen=True)
class ProjectionConfig:
    """How features are turned into text-image logits."""

    mode: str = "cosine"
    scale: float = 100.0

    def __post_init__(self):
        if self.mode not in PROJECTION_MODES:
            raise ConfigError(f"projection mode must be one of {PROJECTION_MODES}, "
                              f"got {self.mode!r}")
        if not self.scale > 0:
            raise ConfigError(f"projection scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class FusionConfig:
    """Convex weight for blending model logits with text-image logits."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")


def project_text(features: FeatureMap, embeddings: EmbeddingMatrix,
                 cfg: ProjectionConfig = ProjectionConfig()) -> LogitsMap:
    """Project an (N,H,W) feature volume through (C,N) embeddings to (C,H,W).

    raw mode:    out[c,h,w] = sum_n t[c,n] * f[n,h,w]
    cosine mode: out[c,h,w] = scale * <t_c / |t_c|, f_hw / |f_hw|>;
                 an all-zero feature pixel maps to 0 in every channel.
    """
    f = features.data
    t = embeddings.data
    if t.shape[1] != f.shape[0]:
        raise ShapeError(
            f"embedding dim {t.shape[1]} does not match feature channels {f.shape[0]}",
            t.shape, f.shape)
    if cfg.mode == "raw":
        out = np.tensordot(t, f, axes=([1], [0]))
        return LogitsMap(out)

    nchan, height, width = f.shape
    flat = f.reshape(nchan, height * width)
    # norms accumulated in float64 without materializing a float64 copy
    norms = np.sqrt(np.einsum("np,np->p", flat, flat, dtype=np.float64))
    inv = np.zeros(norms.shape, dtype=np.float32)
    nonzero = norms > 0.0
    inv[nonzero] = (1.0 / norms[nonzero]).astype(np.float32)
    t64 = t.astype(np.float64)
    t_hat = (t64 / np.linalg.norm(t64, axis=1, keepdims=True)).astype(np.float32)
    out = (t_hat @ flat) * inv
    out *= np.float32(cfg.scale)
    # float32 roundoff can push |cos| a hair past 1; pin the mathematical bound
    np.clip(out, -cfg.scale, cfg.scale, out=out)
    return LogitsMap(out.reshape(t.shape[0], height, width))


def fuse_logits(model_logits: LogitsMap, text_logits: LogitsMap,
                cfg: FusionConfig) -> LogitsMap:
    """Elementwise convex combination alpha*m + (1-alpha)*text."""
    m = model_logits.data
    ft = text_logits.data
    if m.shape != ft.shape:
        raise ShapeError(
            f"logits {m.shape} and text logits {ft.shape} differ in shape",
            m.shape, ft.shape)
    return LogitsMap(cfg.alpha * m + (1.0 - cfg.alpha) * ft)
