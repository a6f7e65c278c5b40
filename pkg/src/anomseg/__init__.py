"""anomseg: pixel-level road anomaly scoring and evaluation.

Scores exported segmentation tensors (model logits, backbone features,
text embeddings) with text-enhanced and ensemble anomaly scores plus the
standard uncertainty baselines, and evaluates any score map against
pixel-level ground truth with exact or streaming AuROC / AuPRC / FPR@95.
"""

from ._kernels import NUMBA_AVAILABLE, NUMBA_ENABLED
from .config import DATASET_PRESETS, EvalConfig, write_dataset_presets
from .enhance import FusionConfig, ProjectionConfig, fuse_logits, project_text
from .errors import (ConfigError, DegenerateError, EngineError, FormatError,
                     IoError, ShapeError, ValidationError)
from .heatmap import colorize, render_heatmap
from .manifest import DatasetManifest, ManifestRecord
from .metrics import (DEFAULT_BINS, EvalAccumulator, MetricsReport,
                      exact_from_pairs, exact_metrics, masked_flatten)
from .runner import run_eval, score_dataset, score_record
from .scores import (SCORE_METHODS, TEXT_METHODS, EnsembleConfig, OdinConfig,
                     entropy, max_logits, mmras, mmras_plus, msp, odin)
from .synth import FixtureSpec, synth_fixture
from .tensors import (AnomalyScoreMap, EmbeddingMatrix, FeatureMap, LabelMask,
                      LogitsMap, load_mask, load_tensor, save_tensor,
                      validate_pair)

__version__ = "0.1.0"

__all__ = [
    "AnomalyScoreMap", "ConfigError", "DATASET_PRESETS", "DEFAULT_BINS",
    "DatasetManifest", "DegenerateError", "EmbeddingMatrix", "EngineError",
    "EnsembleConfig", "EvalAccumulator", "EvalConfig", "FeatureMap",
    "FixtureSpec", "FormatError", "FusionConfig", "IoError", "LabelMask",
    "LogitsMap", "ManifestRecord", "MetricsReport", "NUMBA_AVAILABLE",
    "NUMBA_ENABLED", "OdinConfig", "ProjectionConfig", "SCORE_METHODS",
    "ShapeError", "TEXT_METHODS", "ValidationError", "colorize", "entropy",
    "exact_from_pairs", "exact_metrics", "fuse_logits", "load_mask",
    "load_tensor", "masked_flatten", "max_logits", "mmras", "mmras_plus",
    "msp", "odin", "project_text", "render_heatmap", "run_eval",
    "save_tensor", "score_dataset", "score_record", "synth_fixture",
    "validate_pair", "write_dataset_presets",
]
