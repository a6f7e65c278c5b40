"""Pixel-level AuROC / AuPRC / FPR@95 — exact reference and streaming binned.

Conventions (fixed, so numbers are comparable across runs):

* one global curve over all pooled pixels, never per-image averages;
* each distinct score (or histogram bin) is a single threshold step, swept
  from the most anomalous down;
* AuROC by the trapezoidal rule over the tie-grouped ROC points, which
  equals P(random positive outranks random negative, ties counted half);
* AuPRC as step-wise average precision, sum of (R_k - R_{k-1}) * P_k,
  with no interpolation;
* FPR@95 is the FPR at the first descending threshold whose TPR >= 0.95
  (the all-positive threshold always qualifies), again no interpolation.

The exact path sorts scores; the :class:`EvalAccumulator` keeps fixed-bin
positive/negative histograms instead, so multi-megapixel datasets stream
through O(B) memory and shards merge exactly (integer counters).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import bin_counts
from .errors import ConfigError, DegenerateError, ShapeError, ValidationError
from .tensors import AnomalyScoreMap, LabelMask, validate_pair

DEFAULT_BINS = 4096


@dataclass(frozen=True)
class MetricsReport:
    """Evaluation result plus the pixel bookkeeping behind it."""

    auroc: float
    auprc: float
    fpr_at_95tpr: float
    positives: int
    negatives: int
    ignored: int

    def row(self, method: str, dataset: str, bins, pooling: str = "pooled") -> dict:
        """Flat dict for the JSON/CSV report surfaces."""
        return {
            "method": method,
            "dataset": dataset,
            "auroc": self.auroc,
            "auprc": self.auprc,
            "fpr_at_95tpr": self.fpr_at_95tpr,
            "positives": self.positives,
            "negatives": self.negatives,
            "ignored": self.ignored,
            "bins": bins,
            "pooling": pooling,
        }


def _curve_metrics(pos_groups: np.ndarray, neg_groups: np.ndarray):
    """AuROC, AP, FPR@95 from per-tie-group counts in descending score order."""
    tp = np.cumsum(pos_groups, dtype=np.float64)
    fp = np.cumsum(neg_groups, dtype=np.float64)
    npos = tp[-1]
    nneg = fp[-1]
    if npos == 0 or nneg == 0:
        raise DegenerateError(
            f"need at least one positive and one negative, got {int(npos)}/{int(nneg)}")
    tpr = tp / npos
    fpr = fp / nneg
    xs = np.concatenate(([0.0], fpr))
    ys = np.concatenate(([0.0], tpr))
    auroc = float(np.sum(np.diff(xs) * (ys[1:] + ys[:-1])) / 2.0)
    seen = tp + fp
    precision = np.divide(tp, seen, out=np.zeros_like(tp), where=seen > 0)
    auprc = float(np.sum(np.diff(ys) * precision))
    first = int(np.argmax(tpr >= 0.95))
    fpr95 = float(fpr[first])
    clip = lambda v: min(max(v, 0.0), 1.0)
    return clip(auroc), clip(auprc), clip(fpr95)


def exact_metrics(scores, labels) -> MetricsReport:
    """Exact sort-based metrics over flat score and {0,1} label vectors."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ShapeError(f"scores {s.shape} and labels {y.shape} differ in length",
                         s.shape, y.shape)
    if not np.isfinite(s).all():
        raise ValidationError("scores contain non-finite values")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be 0 or 1")
    uniq, inv = np.unique(s, return_inverse=True)
    pos_per = np.bincount(inv[y == 1], minlength=uniq.size)
    neg_per = np.bincount(inv[y == 0], minlength=uniq.size)
    auroc, auprc, fpr95 = _curve_metrics(pos_per[::-1], neg_per[::-1])
    return MetricsReport(auroc, auprc, fpr95,
                         positives=int(pos_per.sum()),
                         negatives=int(neg_per.sum()),
                         ignored=0)


def masked_flatten(score: AnomalyScoreMap, mask: LabelMask):
    """Split a (score map, mask) pair into flat evaluated scores/labels.

    Returns (scores, labels, ignored_count) with 255 pixels dropped.
    """
    validate_pair(score, mask)
    lab = mask.data.ravel()
    keep = lab != 255
    return (score.data.ravel()[keep], lab[keep],
            int(lab.size - np.count_nonzero(keep)))


def exact_from_pairs(pairs) -> MetricsReport:
    """Exact metrics over (score map, mask) pairs pooled in order."""
    chunks, labels, ignored = [], [], 0
    for score, mask in pairs:
        s, y, n = masked_flatten(score, mask)
        chunks.append(s)
        labels.append(y)
        ignored += n
    if not chunks:
        raise DegenerateError("no pixels to evaluate")
    rep = exact_metrics(np.concatenate(chunks), np.concatenate(labels))
    return MetricsReport(rep.auroc, rep.auprc, rep.fpr_at_95tpr,
                         rep.positives, rep.negatives, ignored)


class EvalAccumulator:
    """Mergeable binned histogram of positive/negative scores.

    Bin i covers [edges[i], edges[i+1]), the last bin also taking scores
    equal to the top edge; scores outside the range land in underflow and
    overflow counters that finalize() treats as the least- and
    most-anomalous tie groups. Single writer; share by merging.
    """

    __slots__ = ("bin_edges", "pos_hist", "neg_hist", "_extra")

    def __init__(self, bin_edges):
        edges = np.asarray(bin_edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("bin_edges must be a 1-D vector of at least 2 edges")
        if not np.isfinite(edges).all():
            raise ConfigError("bin_edges must be finite")
        if not np.all(np.diff(edges) > 0):
            raise ConfigError("bin_edges must be strictly increasing")
        self.bin_edges = edges
        self.pos_hist = np.zeros(edges.size - 1, dtype=np.int64)
        self.neg_hist = np.zeros(edges.size - 1, dtype=np.int64)
        # pos_under, pos_over, neg_under, neg_over, ignored
        self._extra = np.zeros(5, dtype=np.int64)

    @classmethod
    def from_range(cls, lo: float, hi: float, bins: int = DEFAULT_BINS):
        """Uniform accumulator over [lo, hi]; a zero-width range is widened."""
        if not bins >= 1:
            raise ConfigError(f"bins must be >= 1, got {bins}")
        lo = float(lo)
        hi = float(hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ConfigError(f"bad score range [{lo}, {hi}]")
        if lo == hi:
            lo -= 0.5
            hi += 0.5
        return cls(np.linspace(lo, hi, bins + 1))

    @property
    def bins(self) -> int:
        return self.pos_hist.size

    @property
    def positives(self) -> int:
        return int(self.pos_hist.sum() + self._extra[0] + self._extra[1])

    @property
    def negatives(self) -> int:
        return int(self.neg_hist.sum() + self._extra[2] + self._extra[3])

    @property
    def ignored(self) -> int:
        return int(self._extra[4])

    @property
    def underflow(self):
        return int(self._extra[0]), int(self._extra[2])

    @property
    def overflow(self):
        return int(self._extra[1]), int(self._extra[3])

    def accumulate(self, score: AnomalyScoreMap, mask: LabelMask) -> "EvalAccumulator":
        """Bin every non-ignored pixel of one image; returns self."""
        validate_pair(score, mask)
        scores = np.ascontiguousarray(score.data).ravel()
        labels = np.ascontiguousarray(mask.data).ravel()
        bin_counts(scores, labels, self.bin_edges,
                   self.pos_hist, self.neg_hist, self._extra)
        return self

    def merge(self, other: "EvalAccumulator") -> "EvalAccumulator":
        """Counterwise sum with an identically-binned accumulator (new object)."""
        if not isinstance(other, EvalAccumulator):
            raise TypeError("can only merge EvalAccumulator instances")
        if (self.bin_edges.size != other.bin_edges.size
                or not np.array_equal(self.bin_edges, other.bin_edges)):
            raise ConfigError("cannot merge accumulators with different bin edges")
        out = EvalAccumulator(self.bin_edges)
        out.pos_hist = self.pos_hist + other.pos_hist
        out.neg_hist = self.neg_hist + other.neg_hist
        out._extra = self._extra + other._extra
        return out

    def finalize(self) -> MetricsReport:
        """Sweep bins from most to least anomalous and report the metrics."""
        pos_groups = np.concatenate(
            ([self._extra[1]], self.pos_hist[::-1], [self._extra[0]]))
        neg_groups = np.concatenate(
            ([self._extra[3]], self.neg_hist[::-1], [self._extra[2]]))
        auroc, auprc, fpr95 = _curve_metrics(pos_groups, neg_groups)
        return MetricsReport(auroc, auprc, fpr95,
                             positives=self.positives,
                             negatives=self.negatives,
                             ignored=self.ignored)
