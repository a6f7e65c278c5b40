"""Score-map rendering: blue (least anomalous) through red (most anomalous)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import IoError
from .tensors import AnomalyScoreMap

# 5-stop gradient, linearly interpolated per channel.
_STOPS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
_RED = np.array([0.0, 0.0, 0.0, 255.0, 255.0])
_GREEN = np.array([0.0, 255.0, 255.0, 255.0, 0.0])
_BLUE = np.array([255.0, 255.0, 0.0, 0.0, 0.0])


def colorize(normalized: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] through the blue-cyan-green-yellow-red gradient.

    Returns uint8 RGB with one trailing channel axis added.
    """
    v = np.clip(np.asarray(normalized, dtype=np.float64), 0.0, 1.0)
    rgb = np.stack([np.interp(v, _STOPS, _RED),
                    np.interp(v, _STOPS, _GREEN),
                    np.interp(v, _STOPS, _BLUE)], axis=-1)
    return np.rint(rgb).astype(np.uint8)


def render_heatmap(score: AnomalyScoreMap, out_path) -> Path:
    """Write a score map as an 8-bit RGB PNG heatmap.

    Scores are min-max normalized per image (a constant map renders all
    blue); the normalization window is recorded in a tEXt chunk so the
    stretch is recoverable. Output bytes are deterministic for a given
    input.
    """
    from PIL import Image
    from PIL.PngImagePlugin import PngInfo

    data = score.data.astype(np.float64)
    lo = float(data.min())
    hi = float(data.max())
    if hi > lo:
        normalized = (data - lo) / (hi - lo)
    else:
        normalized = np.zeros_like(data)
    rgb = colorize(normalized)
    meta = PngInfo()
    meta.add_text("anomseg:normalization", f"per-image min={lo!r} max={hi!r}")
    out_path = Path(out_path)
    try:
        Image.fromarray(rgb, mode="RGB").save(out_path, format="PNG", pnginfo=meta)
    except OSError as exc:
        raise IoError(f"cannot write {out_path}: {exc}") from exc
    return out_path
