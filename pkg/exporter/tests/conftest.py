import hashlib

import numpy as np
import pytest
import torch


class FakeTextEncoder:
    """Deterministic per-text embeddings: seed drawn from the text itself."""

    def __init__(self, embed_dim=32):
        self.embed_dim = embed_dim

    def encode(self, texts):
        rows = []
        for text in texts:
            seed = int.from_bytes(
                hashlib.sha256(text.encode()).digest()[:8], "little")
            rows.append(np.random.default_rng(seed).normal(size=self.embed_dim))
        return np.stack(rows).astype(np.float32)


class ToySegmenter(torch.nn.Module):
    """Tiny stand-in with the (logits, features) output contract."""

    def __init__(self, classes=5, feat_dim=7):
        super().__init__()
        self.backbone = torch.nn.Conv2d(3, feat_dim, 3, stride=2, padding=1)
        self.head = torch.nn.Conv2d(feat_dim, classes, 1)

    def forward(self, x):
        feats = torch.tanh(self.backbone(x))
        return self.head(feats), feats


@pytest.fixture
def fake_encoder():
    return FakeTextEncoder()


@pytest.fixture(scope="session")
def toy_weights(tmp_path_factory):
    torch.manual_seed(0)
    model = torch.jit.script(ToySegmenter())
    path = tmp_path_factory.mktemp("weights") / "toy.ts"
    model.save(str(path))
    return path


@pytest.fixture(scope="session")
def sample_frames(tmp_path_factory):
    """Four small RGB frames plus paired {0,1,255} masks."""
    from PIL import Image

    root = tmp_path_factory.mktemp("frames")
    images = root / "images"
    masks = root / "masks"
    images.mkdir()
    masks.mkdir()
    rng = np.random.default_rng(3)
    for i in range(4):
        rgb = rng.integers(0, 256, size=(20, 28, 3), dtype=np.uint8)
        Image.fromarray(rgb, mode="RGB").save(images / f"frame_{i}.png")
        mask = np.zeros((10, 14), dtype=np.uint8)
        mask[0, :] = 255
        mask[4:7, 5:9] = 1
        Image.fromarray(mask, mode="L").save(masks / f"frame_{i}.png")
    return images, masks
