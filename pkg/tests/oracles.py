"""Independent reference implementations used only by the tests.

Everything here is deliberately written the slow, literal way (python
loops, per-threshold sweeps) and shares no code with the package, so a
formula bug on either side shows up as a disagreement.
"""

import numpy as np


def brute_force_metrics(scores, labels):
    """Threshold-sweep AuROC / AP / FPR@95 in O(n * thresholds).

    Sweeps every distinct score from high to low, recomputing TP/FP from
    scratch at each step; trapezoidal ROC area, step-wise AP, first
    threshold with TPR >= 0.95 for the FPR readout.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos_total = int(np.sum(labels == 1))
    neg_total = int(np.sum(labels == 0))
    assert pos_total > 0 and neg_total > 0
    points = [(0.0, 0.0)]
    ap = 0.0
    prev_recall = 0.0
    fpr_at_95 = None
    for t in np.unique(scores)[::-1]:
        predicted = scores >= t
        tp = int(np.sum(predicted & (labels == 1)))
        fp = int(np.sum(predicted & (labels == 0)))
        tpr = tp / pos_total
        fpr = fp / neg_total
        points.append((fpr, tpr))
        ap += (tpr - prev_recall) * (tp / (tp + fp))
        prev_recall = tpr
        if fpr_at_95 is None and tpr >= 0.95:
            fpr_at_95 = fpr
    auroc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auroc += (x1 - x0) * (y1 + y0) / 2.0
    return auroc, ap, fpr_at_95


def pairwise_auroc(scores, labels):
    """P(random positive outranks random negative), ties counted half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = np.sum(pos[:, None] > neg[None, :])
    ties = np.sum(pos[:, None] == neg[None, :])
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def linear_scan_bins(scores, labels, edges):
    """Per-pixel python binning: returns (pos, neg, extra) like the kernel."""
    edges = list(map(float, edges))
    nbins = len(edges) - 1
    pos = [0] * nbins
    neg = [0] * nbins
    extra = [0] * 5  # pos_under, pos_over, neg_under, neg_over, ignored
    for s, lab in zip(np.ravel(scores), np.ravel(labels)):
        s = float(s)
        lab = int(lab)
        if lab == 255:
            extra[4] += 1
            continue
        if s < edges[0]:
            extra[0 if lab == 1 else 2] += 1
            continue
        if s > edges[-1]:
            extra[1 if lab == 1 else 3] += 1
            continue
        idx = nbins - 1
        for i in range(nbins):
            if edges[i] <= s < edges[i + 1]:
                idx = i
                break
        (pos if lab == 1 else neg)[idx] += 1
    return np.array(pos), np.array(neg), np.array(extra)


def naive_softmax(vec):
    """Plain exp-normalize, safe only for small logit magnitudes."""
    e = np.exp(np.asarray(vec, dtype=np.float64))
    return e / e.sum()


def gradient_color(v):
    """The documented 5-stop gradient evaluated at one value in [0, 1]."""
    stops = [(0.0, (0, 0, 255)), (0.25, (0, 255, 255)), (0.5, (0, 255, 0)),
             (0.75, (255, 255, 0)), (1.0, (255, 0, 0))]
    v = min(max(float(v), 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(stops, stops[1:]):
        if v <= x1:
            frac = 0.0 if x1 == x0 else (v - x0) / (x1 - x0)
            return tuple(round(a + frac * (b - a)) for a, b in zip(c0, c1))
    return stops[-1][1]
