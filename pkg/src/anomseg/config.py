"""Run configuration and the per-dataset presets the CLI can emit.

Config files are flat JSON; unknown keys are rejected outright so a typo in
``alpha`` or ``w`` cannot silently fall back to a default.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigError
from .metrics import DEFAULT_BINS
from .scores import SCORE_METHODS

_CONFIG_KEYS = {
    "dataset", "method", "alpha", "w", "odin_temperature",
    "projection", "scale", "bins", "dataset_root", "output_dir",
    "score_range", "exact", "jobs",
}


@dataclass(frozen=True)
class EvalConfig:
    """Everything one evaluation run needs besides the dataset itself."""

    method: str = "mmras_plus"
    alpha: float = 0.99
    w: float = 0.7
    odin_temperature: float = 3.0
    projection: str = "cosine"
    scale: float = 100.0
    bins: int = DEFAULT_BINS
    dataset: Optional[str] = None
    dataset_root: Optional[Path] = None
    output_dir: Optional[Path] = None
    score_range: Optional[Tuple[float, float]] = None
    exact: bool = False
    jobs: int = 1

    def validate(self) -> "EvalConfig":
        if self.method not in SCORE_METHODS:
            raise ConfigError(
                f"unknown method {self.method!r}; choose from {SCORE_METHODS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.w <= 1.0:
            raise ConfigError(f"w must lie in [0, 1], got {self.w}")
        if not self.odin_temperature > 0:
            raise ConfigError(f"odin_temperature must be > 0, got {self.odin_temperature}")
        if self.projection not in ("raw", "cosine"):
            raise ConfigError(f"projection must be raw or cosine, got {self.projection!r}")
        if not self.scale > 0:
            raise ConfigError(f"scale must be > 0, got {self.scale}")
        if not isinstance(self.bins, int) or self.bins < 1:
            raise ConfigError(f"bins must be a positive integer, got {self.bins}")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError(f"jobs must be a positive integer, got {self.jobs}")
        if self.score_range is not None:
            lo, hi = self.score_range
            if not float(lo) < float(hi):
                raise ConfigError(f"score_range must be (lo, hi) with lo < hi, "
                                  f"got {self.score_range}")
        return self

    @classmethod
    def from_file(cls, path) -> "EvalConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        unknown = sorted(set(raw) - _CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {unknown}")
        kwargs = dict(raw)
        for key in ("dataset_root", "output_dir"):
            if kwargs.get(key) is not None:
                kwargs[key] = Path(kwargs[key])
        if kwargs.get("score_range") is not None:
            lo, hi = kwargs["score_range"]
            kwargs["score_range"] = (float(lo), float(hi))
        return cls(**kwargs).validate()

    def to_file(self, path) -> Path:
        payload = asdict(self)
        for key in ("dataset_root", "output_dir"):
            if payload[key] is not None:
                payload[key] = str(payload[key])
        payload = {k: v for k, v in payload.items() if v is not None}
        path = Path(path)
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path

    def override(self, **kwargs) -> "EvalConfig":
        """Replace the given fields (None values are ignored) and re-validate."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates).validate()


# Per-benchmark presets: fusion weight alpha, ensemble weight w, and the
# temperature used by the odin baseline. File names are the preset keys.
DATASET_PRESETS = {
    "road_anomaly": EvalConfig(dataset="RoadAnomaly", alpha=0.99, w=0.7),
    "smiyc_ra21": EvalConfig(dataset="SMIYC-RA21", alpha=0.9999999, w=0.7),
    "smiyc_ro21": EvalConfig(dataset="SMIYC-RO21", alpha=0.9999999, w=0.7),
    "fs_static": EvalConfig(dataset="FS-Static", alpha=0.98, w=0.7),
    "fs_lost_and_found": EvalConfig(dataset="FS-LostAndFound", alpha=0.7, w=0.9),
}


def write_dataset_presets(out_dir) -> dict:
    """Emit every preset as ``<out_dir>/<key>.json``; returns {key: path}."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for key, cfg in DATASET_PRESETS.items():
        written[key] = cfg.validate().to_file(out_dir / f"{key}.json")
    return written
