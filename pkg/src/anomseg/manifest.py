"""Dataset manifests: which files make up one evaluable dataset.

Expected layout under a dataset root::

    <root>/manifest.json
    <root>/logits/<id>.npy
    <root>/features/<id>.npy        (optional per record)
    <root>/masks/<id>.npy | .png
    <root>/text_embeddings.npy      (optional, dataset-level)

manifest.json holds ``{"embeddings": <relpath or null>, "records": [...]}``
with per-record keys image_id / logits / feature / mask, all paths relative
to the root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError, FormatError, ValidationError

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class ManifestRecord:
    image_id: str
    logits: Path
    mask: Path
    feature: Optional[Path] = None


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    records: tuple
    embeddings: Optional[Path] = None

    @classmethod
    def load(cls, root) -> "DatasetManifest":
        root = Path(root)
        path = root / MANIFEST_NAME if root.is_dir() else root
        if not path.is_file():
            raise ConfigError(f"no manifest at {path}")
        base = path.parent
        try:
            raw = json.loads(path.read_text())
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict) or "records" not in raw:
            raise FormatError(f"{path}: expected an object with a 'records' list")
        records = []
        for i, rec in enumerate(raw["records"]):
            try:
                records.append(ManifestRecord(
                    image_id=str(rec["image_id"]),
                    logits=base / rec["logits"],
                    mask=base / rec["mask"],
                    feature=(base / rec["feature"]) if rec.get("feature") else None,
                ))
            except (KeyError, TypeError) as exc:
                raise FormatError(f"{path}: record {i} is malformed: {exc}") from exc
        emb = raw.get("embeddings")
        manifest = cls(root=base, records=tuple(records),
                       embeddings=(base / emb) if emb else None)
        manifest.validate()
        return manifest

    def validate(self, require_features: bool = False) -> None:
        ids = [r.image_id for r in self.records]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate image ids in manifest: {dupes}")
        for rec in self.records:
            for p in (rec.logits, rec.mask, rec.feature):
                if p is not None and not Path(p).is_file():
                    raise ValidationError(f"manifest references missing file {p}")
        if self.embeddings is not None and not Path(self.embeddings).is_file():
            raise ValidationError(
                f"manifest references missing embeddings {self.embeddings}")
        if require_features:
            missing = [r.image_id for r in self.records if r.feature is None]
            if missing:
                raise ConfigError(f"records without features: {missing}")
            if self.embeddings is None:
                raise ConfigError("manifest has no text embeddings")

    def save(self) -> Path:
        """Write manifest.json under the root (paths stored relative)."""
        payload = {
            "embeddings": (str(self.embeddings.relative_to(self.root))
                           if self.embeddings else None),
            "records": [
                {
                    "image_id": r.image_id,
                    "logits": str(r.logits.relative_to(self.root)),
                    "mask": str(r.mask.relative_to(self.root)),
                    "feature": (str(r.feature.relative_to(self.root))
                                if r.feature else None),
                }
                for r in self.records
            ],
        }
        out = self.root / MANIFEST_NAME
        out.write_text(json.dumps(payload, indent=2) + "\n")
        return out
