import hashlib
from pathlib import Path

import numpy as np
import pytest

from anomseg import (ConfigError, EvalConfig, FixtureSpec, load_mask,
                     load_tensor, run_eval, synth_fixture)
from anomseg.synth import IGNORE_BORDER

SMALL = FixtureSpec(images=3, height=48, width=40, classes=5, embed_dim=16,
                    anomaly_fraction=0.1, separation=6.0)


def tree_digest(root):
    digest = hashlib.sha256()
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            digest.update(path.relative_to(root).as_posix().encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        synth_fixture(42, SMALL, tmp_path / "a")
        synth_fixture(42, SMALL, tmp_path / "b")
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_different_seed_differs(self, tmp_path):
        synth_fixture(1, SMALL, tmp_path / "a")
        synth_fixture(2, SMALL, tmp_path / "b")
        assert tree_digest(tmp_path / "a") != tree_digest(tmp_path / "b")


@pytest.fixture(scope="module")
def fixture_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture")
    manifest = synth_fixture(7, SMALL, root)
    return root, manifest


class TestStructure:
    def test_layout_and_manifest(self, fixture_root):
        root, manifest = fixture_root
        assert (root / "manifest.json").is_file()
        assert (root / "text_embeddings.npy").is_file()
        assert len(manifest.records) == SMALL.images
        ids = [r.image_id for r in manifest.records]
        assert len(set(ids)) == len(ids)

    def test_tensor_shapes_consistent(self, fixture_root):
        _, manifest = fixture_root
        emb = load_tensor(manifest.embeddings, "embedding")
        assert emb.data.shape == (SMALL.classes, SMALL.embed_dim)
        for rec in manifest.records:
            logits = load_tensor(rec.logits, "logits")
            feats = load_tensor(rec.feature, "feature")
            mask = load_mask(rec.mask)
            assert logits.data.shape == (SMALL.classes, SMALL.height, SMALL.width)
            assert feats.data.shape == (SMALL.embed_dim, SMALL.height, SMALL.width)
            assert mask.data.shape == (SMALL.height, SMALL.width)

    def test_ignore_border(self, fixture_root):
        _, manifest = fixture_root
        for rec in manifest.records:
            mask = load_mask(rec.mask).data
            b = IGNORE_BORDER
            assert np.all(mask[:b, :] == 255) and np.all(mask[-b:, :] == 255)
            assert np.all(mask[:, :b] == 255) and np.all(mask[:, -b:] == 255)
            inner = mask[b:-b, b:-b]
            assert np.all(np.isin(inner, (0, 1)))

    def test_anomaly_region_present_and_rectangular(self, fixture_root):
        _, manifest = fixture_root
        for rec in manifest.records:
            mask = load_mask(rec.mask).data
            ys, xs = np.nonzero(mask == 1)
            assert ys.size > 0
            h = ys.max() - ys.min() + 1
            w = xs.max() - xs.min() + 1
            assert ys.size == h * w  # filled rectangle


class TestSeparability:
    def test_zero_separation_is_uninformative(self, tmp_path):
        spec = FixtureSpec(images=10, height=104, width=104, classes=19,
                           embed_dim=64, anomaly_fraction=0.08, separation=0.0)
        manifest = synth_fixture(5, spec, tmp_path / "flat")
        rep = run_eval(manifest, EvalConfig(method="max_logits", exact=True))
        assert rep.positives + rep.negatives == 100_000
        assert abs(rep.auroc - 0.5) <= 0.02

    def test_high_separation_is_nearly_perfect(self, tmp_path):
        spec = FixtureSpec(images=6, height=128, width=128, separation=8.0)
        manifest = synth_fixture(5, spec, tmp_path / "sep")
        rep = run_eval(manifest, EvalConfig(method="max_logits"))
        assert rep.auroc >= 0.99


class TestSpecValidation:
    def test_bad_fraction(self):
        with pytest.raises(ConfigError):
            FixtureSpec(anomaly_fraction=0.0)
        with pytest.raises(ConfigError):
            FixtureSpec(anomaly_fraction=1.0)

    def test_too_small_for_border(self):
        with pytest.raises(ConfigError):
            FixtureSpec(height=6, width=6)

    def test_needs_two_classes(self):
        with pytest.raises(ConfigError):
            FixtureSpec(classes=1)
