import json

import numpy as np
import pytest

from anomseg import (ConfigError, DATASET_PRESETS, DatasetManifest,
                     DegenerateError, EvalConfig, FixtureSpec, ValidationError,
                     exact_metrics, load_mask, load_tensor, run_eval,
                     score_dataset, synth_fixture, write_dataset_presets)

SMALL = FixtureSpec(images=2, height=32, width=32, classes=4, embed_dim=8,
                    anomaly_fraction=0.15, separation=4.0)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("ds")
    return synth_fixture(3, SMALL, root)


class TestRunEval:
    def test_exact_backend_matches_hand_pooled_pixels(self, dataset):
        rep = run_eval(dataset, EvalConfig(method="max_logits", exact=True))
        scores, labels = [], []
        for rec in dataset.records:
            logits = load_tensor(rec.logits, "logits").data
            mask = load_mask(rec.mask).data
            smap = 1.0 - logits.max(axis=0).astype(np.float64)
            keep = mask != 255
            scores.append(smap[keep])
            labels.append(mask[keep])
        hand = exact_metrics(np.concatenate(scores), np.concatenate(labels))
        assert rep.auroc == hand.auroc
        assert rep.auprc == hand.auprc
        assert rep.fpr_at_95tpr == hand.fpr_at_95tpr

    def test_binned_backend_close_to_hand_pooled(self, dataset):
        rep = run_eval(dataset, EvalConfig(method="max_logits", bins=4096))
        exact = run_eval(dataset, EvalConfig(method="max_logits", exact=True))
        assert abs(rep.auroc - exact.auroc) <= 2e-3
        assert abs(rep.auprc - exact.auprc) <= 2e-3
        assert abs(rep.fpr_at_95tpr - exact.fpr_at_95tpr) <= 2e-3

    def test_alpha_one_mmras_equals_max_logits(self, dataset):
        a = run_eval(dataset, EvalConfig(method="mmras", alpha=1.0))
        b = run_eval(dataset, EvalConfig(method="max_logits"))
        assert a == b

    def test_w_zero_mmras_plus_equals_max_logits(self, dataset):
        a = run_eval(dataset, EvalConfig(method="mmras_plus", alpha=0.5, w=0.0))
        b = run_eval(dataset, EvalConfig(method="max_logits"))
        assert a == b

    def test_w_one_mmras_plus_equals_mmras(self, dataset):
        a = run_eval(dataset, EvalConfig(method="mmras_plus", alpha=0.37, w=1.0))
        b = run_eval(dataset, EvalConfig(method="mmras", alpha=0.37))
        assert a == b

    def test_every_method_runs(self, dataset):
        for method in ("mmras", "mmras_plus", "msp", "entropy", "odin",
                       "max_logits", "mask2anomaly_logits"):
            rep = run_eval(dataset, EvalConfig(method=method))
            assert 0.0 <= rep.auroc <= 1.0

    def test_jobs_do_not_change_the_report(self, dataset):
        base = run_eval(dataset, EvalConfig(method="mmras_plus", jobs=1))
        for jobs in (2, 3, 8):
            assert run_eval(dataset, EvalConfig(method="mmras_plus",
                                                jobs=jobs)) == base

    def test_one_pass_mode_uses_given_range(self, dataset):
        narrow = run_eval(dataset, EvalConfig(method="max_logits",
                                              score_range=(-0.5, 0.5)))
        full = run_eval(dataset, EvalConfig(method="max_logits"))
        assert narrow.positives == full.positives
        assert narrow.negatives == full.negatives

    def test_empty_manifest_degenerate(self, dataset):
        empty = DatasetManifest(root=dataset.root, records=(),
                                embeddings=dataset.embeddings)
        with pytest.raises(DegenerateError):
            run_eval(empty, EvalConfig(method="max_logits"))

    def test_text_method_without_features(self, dataset):
        stripped = DatasetManifest(
            root=dataset.root,
            records=tuple(r.__class__(image_id=r.image_id, logits=r.logits,
                                      mask=r.mask, feature=None)
                          for r in dataset.records),
            embeddings=dataset.embeddings)
        with pytest.raises(ConfigError):
            run_eval(stripped, EvalConfig(method="mmras"))
        # non-text methods are fine on the same manifest
        run_eval(stripped, EvalConfig(method="msp"))


class TestScoreDataset:
    def test_writes_one_map_per_record(self, dataset, tmp_path):
        out = tmp_path / "scores"
        written = score_dataset(dataset, EvalConfig(method="msp"), out)
        assert len(written) == len(dataset.records)
        for rec, path in zip(dataset.records, written):
            smap = load_tensor(path, "score")
            assert smap.data.shape == (SMALL.height, SMALL.width)


class TestManifest:
    def test_round_trip(self, dataset):
        again = DatasetManifest.load(dataset.root)
        assert [r.image_id for r in again.records] == [
            r.image_id for r in dataset.records]
        assert again.embeddings == dataset.embeddings

    def test_duplicate_ids_rejected(self, dataset, tmp_path):
        payload = json.loads((dataset.root / "manifest.json").read_text())
        payload["records"].append(dict(payload["records"][0]))
        clone = tmp_path / "dup"
        clone.mkdir()
        (clone / "manifest.json").write_text(json.dumps(payload))
        for sub in ("logits", "features", "masks"):
            (clone / sub).symlink_to(dataset.root / sub)
        (clone / "text_embeddings.npy").symlink_to(dataset.root / "text_embeddings.npy")
        with pytest.raises(ValidationError):
            DatasetManifest.load(clone)

    def test_missing_file_rejected(self, dataset, tmp_path):
        payload = json.loads((dataset.root / "manifest.json").read_text())
        payload["records"][0]["logits"] = "logits/not_there.npy"
        clone = tmp_path / "missing"
        clone.mkdir()
        (clone / "manifest.json").write_text(json.dumps(payload))
        for sub in ("logits", "features", "masks"):
            (clone / sub).symlink_to(dataset.root / sub)
        (clone / "text_embeddings.npy").symlink_to(dataset.root / "text_embeddings.npy")
        with pytest.raises(ValidationError):
            DatasetManifest.load(clone)

    def test_no_manifest_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            DatasetManifest.load(tmp_path)

    def test_bad_json_is_format_error(self, tmp_path):
        from anomseg import FormatError
        (tmp_path / "manifest.json").write_text("{nope")
        with pytest.raises(FormatError):
            DatasetManifest.load(tmp_path)


class TestEvalConfig:
    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"method": "msp", "aplha": 0.9}))
        with pytest.raises(ConfigError):
            EvalConfig.from_file(path)

    def test_round_trip(self, tmp_path):
        cfg = EvalConfig(method="odin", odin_temperature=2.5, bins=128,
                         dataset="x")
        path = cfg.to_file(tmp_path / "cfg.json")
        assert EvalConfig.from_file(path) == cfg

    @pytest.mark.parametrize("bad", [
        {"method": "unknown"},
        {"alpha": 1.5},
        {"w": -0.1},
        {"odin_temperature": 0.0},
        {"projection": "nearest"},
        {"bins": 0},
        {"jobs": 0},
        {"score_range": (1.0, 1.0)},
    ])
    def test_invalid_values(self, bad):
        with pytest.raises(ConfigError):
            EvalConfig(**bad).validate()


class TestPresets:
    def test_reported_hyperparameters(self):
        road = DATASET_PRESETS["road_anomaly"]
        assert (road.alpha, road.w) == (0.99, 0.7)
        for key in ("smiyc_ra21", "smiyc_ro21"):
            assert (DATASET_PRESETS[key].alpha, DATASET_PRESETS[key].w) == (
                0.9999999, 0.7)
        assert (DATASET_PRESETS["fs_static"].alpha,
                DATASET_PRESETS["fs_static"].w) == (0.98, 0.7)
        assert (DATASET_PRESETS["fs_lost_and_found"].alpha,
                DATASET_PRESETS["fs_lost_and_found"].w) == (0.7, 0.9)
        for cfg in DATASET_PRESETS.values():
            assert cfg.odin_temperature == 3.0
            cfg.validate()

    def test_emitted_files_parse_and_validate(self, tmp_path):
        written = write_dataset_presets(tmp_path)
        assert set(written) == set(DATASET_PRESETS)
        for key, path in written.items():
            cfg = EvalConfig.from_file(path)
            assert cfg == DATASET_PRESETS[key]
