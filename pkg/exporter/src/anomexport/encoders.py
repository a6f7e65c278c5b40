"""Text encoder adapters.

Anything with an ``embed_dim`` attribute and an ``encode(texts) -> (n, N)
float32 array`` method works as an encoder; :class:`ClipTextEncoder` wraps a
local CLIP checkpoint through transformers.
"""

from __future__ import annotations

from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import AssetError


class TextEncoder(Protocol):
    embed_dim: int

    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


class ClipTextEncoder:
    """CLIP text tower loaded from a local checkpoint directory."""

    def __init__(self, checkpoint: str, device: str = "cpu", batch_size: int = 64):
        path = Path(checkpoint)
        if not path.exists():
            raise AssetError(f"text encoder checkpoint {path} does not exist")
        try:
            from transformers import CLIPTextModelWithProjection, CLIPTokenizer
        except ImportError as exc:
            raise AssetError(
                "transformers is required for the CLIP text encoder "
                "(pip install anomexport[clip])") from exc
        import torch

        self._torch = torch
        self._device = device
        self._batch_size = batch_size
        try:
            self._tokenizer = CLIPTokenizer.from_pretrained(path)
            self._model = CLIPTextModelWithProjection.from_pretrained(path)
        except (OSError, ValueError) as exc:
            raise AssetError(f"cannot load text encoder from {path}: {exc}") from exc
        self._model.eval().to(device)
        self.embed_dim = int(self._model.config.projection_dim)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        torch = self._torch
        chunks = []
        with torch.no_grad():
            for start in range(0, len(texts), self._batch_size):
                batch = list(texts[start:start + self._batch_size])
                tokens = self._tokenizer(batch, padding=True, truncation=True,
                                         return_tensors="pt").to(self._device)
                out = self._model(**tokens).text_embeds
                chunks.append(out.cpu().numpy().astype(np.float32))
        return np.concatenate(chunks, axis=0)
