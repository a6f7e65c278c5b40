"""Per-pixel anomaly score functions, all oriented "higher = more anomalous".

Scores are computed in float64 from the float32 logits; none are clamped,
since downstream metrics are rank-based and clamping would destroy
information. Softmax-based scores use max-subtraction throughout (model
logits routinely reach magnitude ~50).
"""

from __future__ import annotations

from dataclasses import dataclass

from ._kernels import channel_max, softmax_entropy, softmax_max
from .errors import ConfigError, ShapeError
from .tensors import AnomalyScoreMap, LogitsMap


@dataclass(frozen=True)
class EnsembleConfig:
    """Convex weight for blending two anomaly score maps."""

    w: float

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ConfigError(f"w must lie in [0, 1], got {self.w}")


@dataclass(frozen=True)
class OdinConfig:
    """Temperature for the temperature-scaled softmax score."""

    temperature: float = 3.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")


def mmras(logits: LogitsMap) -> AnomalyScoreMap:
    """One minus the per-pixel channel maximum of the (fused) logits."""
    return AnomalyScoreMap(1.0 - channel_max(logits.data))


def max_logits(logits: LogitsMap) -> AnomalyScoreMap:
    """One minus the per-pixel maximum raw logit.

    Same arithmetic as :func:`mmras`; the 1-minus offset (rather than plain
    negation) keeps every score function on one orientation, and rank-based
    metrics cannot tell the two apart.
    """
    return AnomalyScoreMap(1.0 - channel_max(logits.data))


def mmras_plus(fused_logits: LogitsMap, model_logits: LogitsMap,
               cfg: EnsembleConfig) -> AnomalyScoreMap:
    """Ensemble boost: w*(1 - max fused) + (1-w)*(1 - max model)."""
    if fused_logits.data.shape != model_logits.data.shape:
        raise ShapeError(
            f"fused logits {fused_logits.data.shape} and model logits "
            f"{model_logits.data.shape} differ in shape",
            fused_logits.data.shape, model_logits.data.shape)
    a = 1.0 - channel_max(fused_logits.data)
    b = 1.0 - channel_max(model_logits.data)
    return AnomalyScoreMap(cfg.w * a + (1.0 - cfg.w) * b)


def msp(logits: LogitsMap) -> AnomalyScoreMap:
    """One minus the maximum softmax probability."""
    return AnomalyScoreMap(1.0 - softmax_max(logits.data, 1.0))


def odin(logits: LogitsMap, cfg: OdinConfig = OdinConfig()) -> AnomalyScoreMap:
    """One minus the maximum softmax probability at logits / temperature."""
    return AnomalyScoreMap(1.0 - softmax_max(logits.data, 1.0 / cfg.temperature))


def entropy(logits: LogitsMap) -> AnomalyScoreMap:
    """Softmax entropy in nats, in [0, ln C]; p=0 terms contribute 0."""
    return AnomalyScoreMap(softmax_entropy(logits.data))


# Method registry for the CLI / pipeline. mask2anomaly_logits scores the raw
# model logits exactly like max_logits; it exists as a separate name so runs
# against plain model exports are labeled as such in reports.
SCORE_METHODS = (
    "mmras",
    "mmras_plus",
    "msp",
    "entropy",
    "odin",
    "max_logits",
    "mask2anomaly_logits",
)

# Methods that consume fused logits and therefore need features + embeddings.
TEXT_METHODS = frozenset({"mmras", "mmras_plus"})
