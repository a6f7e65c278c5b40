"""Dataset-level orchestration: load, score, pool, report.

Images are independent work units. The binned path runs two passes — a
min/max scan of the evaluated pixels fixes the bin range, then every image
is histogrammed — with records split across a thread pool into per-shard
accumulators that merge in fixed shard order. Counters are integers, so any
worker count yields a bit-identical report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from . import scores as score_mod
from .config import EvalConfig
from .enhance import FusionConfig, ProjectionConfig, fuse_logits, project_text
from .errors import ConfigError, DegenerateError, ShapeError
from .manifest import DatasetManifest, ManifestRecord
from .metrics import EvalAccumulator, MetricsReport, exact_from_pairs
from .scores import TEXT_METHODS
from .tensors import (AnomalyScoreMap, EmbeddingMatrix, LabelMask,
                      load_mask, load_tensor, save_tensor)


def score_record(record: ManifestRecord, cfg: EvalConfig,
                 embeddings: Optional[EmbeddingMatrix]
                 ) -> Tuple[AnomalyScoreMap, LabelMask]:
    """Load one record's tensors and produce its (score map, mask) pair."""
    model_logits = load_tensor(record.logits, "logits")
    mask = load_mask(record.mask)
    if model_logits.data.shape[1:] != mask.data.shape:
        raise ShapeError(
            f"{record.image_id}: logits {model_logits.data.shape} vs "
            f"mask {mask.data.shape}",
            model_logits.data.shape, mask.data.shape)

    method = cfg.method
    if method in TEXT_METHODS:
        features = load_tensor(record.feature, "feature")
        if features.data.shape[1:] != model_logits.data.shape[1:]:
            raise ShapeError(
                f"{record.image_id}: features {features.data.shape} vs "
                f"logits {model_logits.data.shape}",
                features.data.shape, model_logits.data.shape)
        text_logits = project_text(features, embeddings,
                                   ProjectionConfig(cfg.projection, cfg.scale))
        fused = fuse_logits(model_logits, text_logits, FusionConfig(cfg.alpha))
        if method == "mmras":
            smap = score_mod.mmras(fused)
        else:
            smap = score_mod.mmras_plus(fused, model_logits,
                                        score_mod.EnsembleConfig(cfg.w))
    elif method == "msp":
        smap = score_mod.msp(model_logits)
    elif method == "entropy":
        smap = score_mod.entropy(model_logits)
    elif method == "odin":
        smap = score_mod.odin(model_logits,
                              score_mod.OdinConfig(cfg.odin_temperature))
    elif method in ("max_logits", "mask2anomaly_logits"):
        smap = score_mod.max_logits(model_logits)
    else:
        raise ConfigError(f"unknown method {method!r}")
    return smap, mask


def _prepare(manifest: DatasetManifest, cfg: EvalConfig) -> Optional[EmbeddingMatrix]:
    cfg.validate()
    if not manifest.records:
        raise DegenerateError("manifest lists no records")
    if cfg.method in TEXT_METHODS:
        manifest.validate(require_features=True)
        return load_tensor(manifest.embeddings, "embedding")
    manifest.validate()
    return None


def _valid_range(pairs) -> Tuple[float, float]:
    """Min/max of evaluated (non-ignored) scores across pairs; NaN if none."""
    lo, hi = np.inf, -np.inf
    for smap, mask in pairs:
        keep = mask.data != 255
        if keep.any():
            vals = smap.data[keep]
            lo = min(lo, float(vals.min()))
            hi = max(hi, float(vals.max()))
    return lo, hi


def run_eval(manifest: DatasetManifest, cfg: EvalConfig) -> MetricsReport:
    """Score every record, pool all evaluated pixels, return one report."""
    embeddings = _prepare(manifest, cfg)
    shards: List[List[ManifestRecord]] = [
        list(manifest.records[i::cfg.jobs]) for i in range(cfg.jobs)]
    shards = [s for s in shards if s]

    def score_shard(records):
        return [score_record(r, cfg, embeddings) for r in records]

    if cfg.jobs == 1:
        scored = [score_shard(shards[0])] if shards else []
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            scored = list(pool.map(score_shard, shards))

    if cfg.exact:
        pairs = [pair for shard in scored for pair in shard]
        return exact_from_pairs(pairs)

    if cfg.score_range is not None:
        lo, hi = cfg.score_range
    else:
        ranges = [_valid_range(shard) for shard in scored]
        lo = min((r[0] for r in ranges), default=np.inf)
        hi = max((r[1] for r in ranges), default=-np.inf)
        if not np.isfinite(lo) or not np.isfinite(hi):
            raise DegenerateError("no evaluated pixels in the whole dataset")

    def bin_shard(shard):
        acc = EvalAccumulator.from_range(lo, hi, cfg.bins)
        for smap, mask in shard:
            acc.accumulate(smap, mask)
        return acc

    if cfg.jobs == 1:
        accs = [bin_shard(shard) for shard in scored]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            accs = list(pool.map(bin_shard, scored))

    total = accs[0]
    for acc in accs[1:]:
        total = total.merge(acc)
    return total.finalize()


def score_dataset(manifest: DatasetManifest, cfg: EvalConfig, out_dir) -> List:
    """Write one float32 score map per record to <out_dir>/<image_id>.npy."""
    from pathlib import Path

    embeddings = _prepare(manifest, cfg)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for record in manifest.records:
        smap, _ = score_record(record, cfg, embeddings)
        path = out_dir / f"{record.image_id}.npy"
        save_tensor(smap, path)
        written.append(path)
    return written
