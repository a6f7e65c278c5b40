"""Hot per-pixel kernels: channel reductions, softmax scores, histogram binning.

Every kernel exists twice: a numba ``@njit`` implementation and a pure-numpy
fallback. The jitted path is selected once at import time when numba imports
cleanly and the environment variable ``ANOMSEG_NUMBA`` is not set to
``0``/``false``/``off``. ``benchmarks/bench_kernels.py`` times both paths.

All kernels are serial and allocation-light so results are bit-reproducible
across worker counts.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_wanted() -> bool:
    flag = os.environ.get("ANOMSEG_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def channel_max_numpy(logits: np.ndarray) -> np.ndarray:
    """Per-pixel maximum over the leading channel axis, in float64."""
    return logits.max(axis=0).astype(np.float64)


def softmax_max_numpy(logits: np.ndarray, inv_temp: float) -> np.ndarray:
    """Per-pixel maximum softmax probability of ``logits * inv_temp``.

    Uses max-subtraction; the winning channel reduces to exp(0), so the
    result is 1 / sum(exp(z - z_max)).
    """
    z = logits.astype(np.float64) * inv_temp
    z -= z.max(axis=0)
    np.exp(z, out=z)
    return 1.0 / z.sum(axis=0)


def softmax_entropy_numpy(logits: np.ndarray) -> np.ndarray:
    """Per-pixel softmax entropy (natural log); underflowed p contribute 0."""
    z = logits.astype(np.float64)
    z -= z.max(axis=0)
    e = np.exp(z)
    p = e / e.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0.0, p * np.log(p), 0.0)
    return -plogp.sum(axis=0)


def bin_counts_numpy(scores, labels, edges, pos_hist, neg_hist, extra) -> None:
    """Histogram one flat batch of (score, label) pairs into the counters.

    extra holds [pos_underflow, pos_overflow, neg_underflow, neg_overflow,
    ignored]. Bin i covers [edges[i], edges[i+1]); the last bin also takes
    scores equal to edges[-1]. Label 255 only bumps the ignored counter.
    """
    nbins = edges.shape[0] - 1
    keep = labels != 255
    extra[4] += int(labels.size - np.count_nonzero(keep))
    s = scores[keep]
    pos = labels[keep] == 1
    under = s < edges[0]
    over = s > edges[-1]
    extra[0] += int(np.count_nonzero(under & pos))
    extra[1] += int(np.count_nonzero(over & pos))
    extra[2] += int(np.count_nonzero(under & ~pos))
    extra[3] += int(np.count_nonzero(over & ~pos))
    inside = ~(under | over)
    idx = np.searchsorted(edges, s[inside], side="right") - 1
    idx[idx == nbins] = nbins - 1
    pin = pos[inside]
    pos_hist += np.bincount(idx[pin], minlength=nbins)
    neg_hist += np.bincount(idx[~pin], minlength=nbins)


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily per dtype, cached on disk)
# ---------------------------------------------------------------------------

NUMBA_AVAILABLE = False
try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via ANOMSEG_NUMBA=0 instead
    njit = None

if NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def channel_max_numba(logits):
        # channel-outer loops keep each plane scan contiguous
        nchan, height, width = logits.shape
        out = np.empty((height, width), np.float64)
        for h in range(height):
            for w in range(width):
                out[h, w] = logits[0, h, w]
        for c in range(1, nchan):
            for h in range(height):
                for w in range(width):
                    v = np.float64(logits[c, h, w])
                    if v > out[h, w]:
                        out[h, w] = v
        return out

    @njit(cache=True, nogil=True)
    def softmax_max_numba(logits, inv_temp):
        nchan, height, width = logits.shape
        out = np.empty((height, width), np.float64)
        for h in range(height):
            for w in range(width):
                zmax = np.float64(logits[0, h, w]) * inv_temp
                for c in range(1, nchan):
                    z = np.float64(logits[c, h, w]) * inv_temp
                    if z > zmax:
                        zmax = z
                total = 0.0
                for c in range(nchan):
                    total += np.exp(np.float64(logits[c, h, w]) * inv_temp - zmax)
                out[h, w] = 1.0 / total
        return out

    @njit(cache=True, nogil=True)
    def softmax_entropy_numba(logits):
        # H = log(s) - (1/s) * sum(e_c * z_c) with z_c = logit - max, s = sum(e_c)
        nchan, height, width = logits.shape
        out = np.empty((height, width), np.float64)
        for h in range(height):
            for w in range(width):
                zmax = np.float64(logits[0, h, w])
                for c in range(1, nchan):
                    v = np.float64(logits[c, h, w])
                    if v > zmax:
                        zmax = v
                total = 0.0
                weighted = 0.0
                for c in range(nchan):
                    z = np.float64(logits[c, h, w]) - zmax
                    e = np.exp(z)
                    total += e
                    weighted += e * z
                out[h, w] = np.log(total) - weighted / total
        return out

    @njit(cache=True, nogil=True)
    def bin_counts_numba(scores, labels, edges, pos_hist, neg_hist, extra):
        nbins = edges.shape[0] - 1
        lo = edges[0]
        hi = edges[nbins]
        for i in range(scores.shape[0]):
            lab = labels[i]
            if lab == 255:
                extra[4] += 1
                continue
            s = np.float64(scores[i])
            if s < lo:
                if lab == 1:
                    extra[0] += 1
                else:
                    extra[2] += 1
            elif s > hi:
                if lab == 1:
                    extra[1] += 1
                else:
                    extra[3] += 1
            else:
                # bisect_right(edges, s) - 1; scores equal to hi join the top bin
                left = 0
                right = nbins + 1
                while left < right:
                    mid = (left + right) // 2
                    if edges[mid] <= s:
                        left = mid + 1
                    else:
                        right = mid
                j = left - 1
                if j == nbins:
                    j = nbins - 1
                if lab == 1:
                    pos_hist[j] += 1
                else:
                    neg_hist[j] += 1

else:  # pragma: no cover
    channel_max_numba = None
    softmax_max_numba = None
    softmax_entropy_numba = None
    bin_counts_numba = None


NUMBA_ENABLED = NUMBA_AVAILABLE and _numba_wanted()

if NUMBA_ENABLED:
    channel_max = channel_max_numba
    softmax_max = softmax_max_numba
    softmax_entropy = softmax_entropy_numba
    bin_counts = bin_counts_numba
else:
    channel_max = channel_max_numpy
    softmax_max = softmax_max_numpy
    softmax_entropy = softmax_entropy_numpy
    bin_counts = bin_counts_numpy


def warmup() -> None:
    """Trigger JIT compilation of the dispatched kernels on tiny inputs.

    Warms both float32 and float64 score variants so timed sections never
    pay compile cost. No-op on the numpy path.
    """
    logits = np.zeros((2, 1, 2), dtype=np.float32)
    channel_max(logits)
    softmax_max(logits, 1.0)
    softmax_entropy(logits)
    edges = np.array([0.0, 1.0])
    hist = np.zeros(1, dtype=np.int64)
    extra = np.zeros(5, dtype=np.int64)
    labels = np.array([0, 1, 255], dtype=np.uint8)
    for dt in (np.float32, np.float64):
        bin_counts(np.array([0.5, 0.5, 0.5], dtype=dt), labels, edges,
                   hist, hist.copy(), extra)
