"""Segmentation quality metrics against a ground-truth label map.

Three standard superpixel benchmarks: achievable segmentation accuracy
(ASA), under-segmentation error (UE), and boundary recall (BR) with a
Chebyshev pixel tolerance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .extract import Segmentation, canonical_labels

__all__ = ["GroundTruth", "MetricsReport", "asa", "under_seg_error",
           "boundary_recall", "boundary_mask", "evaluate"]


class GroundTruth:
    """Reference label map; ids are canonicalized to a dense range."""

    def __init__(self, labels):
        labels = np.asarray(labels)
        if labels.ndim != 2:
            raise ValueError(f"ground truth must be 2-D, got shape {labels.shape}")
        self.labels = canonical_labels(labels.ravel()).reshape(labels.shape)
        self.segment_count = int(self.labels.max()) + 1 if labels.size else 0

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]


@dataclass
class MetricsReport:
    asa: float
    ue: float
    br: float
    k: int
    epsilon: int

    def line(self):
        return f"k={self.k} asa={self.asa:.6f} ue={self.ue:.6f} br={self.br:.6f} eps={self.epsilon}"


def _check_dims(s: Segmentation, g: GroundTruth):
    if (s.height, s.width) != (g.height, g.width):
        raise ValueError(
            f"segmentation {s.width}x{s.height} does not match "
            f"ground truth {g.width}x{g.height}"
        )


def _contingency(s: Segmentation, g: GroundTruth):
    """Exact overlap table, shape (superpixels, ground-truth segments)."""
    ns = int(s.labels.max()) + 1
    ng = g.segment_count
    idx = s.labels.ravel() * ng + g.labels.ravel()
    return np.bincount(idx, minlength=ns * ng).reshape(ns, ng)


def asa(s: Segmentation, g: GroundTruth) -> float:
    """Fraction of pixels correct if each superpixel took its dominant segment."""
    _check_dims(s, g)
    table = _contingency(s, g)
    return float(table.max(axis=1).sum() / table.sum())


def under_seg_error(s: Segmentation, g: GroundTruth) -> float:
    """Total leakage of superpixels across ground-truth borders.

    For each ground-truth segment, every overlapping superpixel
    contributes the smaller of its inside and outside parts; the total
    is normalized by image area.
    """
    _check_dims(s, g)
    table = _contingency(s, g)
    sp_size = table.sum(axis=1, keepdims=True)
    leak = np.where(table > 0, np.minimum(table, sp_size - table), 0)
    return float(leak.sum() / table.sum())


def boundary_mask(labels):
    """Pixels whose right or bottom 4-neighbor has a different label."""
    labels = np.asarray(labels)
    mask = np.zeros(labels.shape, dtype=bool)
    mask[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    mask[:-1, :] |= labels[:-1, :] != labels[1:, :]
    return mask


def boundary_recall(s: Segmentation, g: GroundTruth, epsilon: int = 2) -> float:
    """Fraction of ground-truth boundary pixels matched within Chebyshev epsilon."""
    _check_dims(s, g)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    gt_b = boundary_mask(g.labels)
    total = int(gt_b.sum())
    if total == 0:
        return 1.0
    s_b = boundary_mask(s.labels)
    size = 2 * epsilon + 1
    near = maximum_filter(s_b.astype(np.uint8), size=size, mode="constant") > 0
    tp = int((gt_b & near).sum())
    return tp / total


def evaluate(s: Segmentation, gts, epsilon: int = 2) -> MetricsReport:
    """Score against one or several ground truths; values average uniformly."""
    if isinstance(gts, GroundTruth):
        gts = [gts]
    if not gts:
        raise ValueError("at least one ground truth is required")
    asas, ues, brs = [], [], []
    for g in gts:
        asas.append(asa(s, g))
        ues.append(under_seg_error(s, g))
        brs.append(boundary_recall(s, g, epsilon))
    return MetricsReport(
        asa=float(np.mean(asas)),
        ue=float(np.mean(ues)),
        br=float(np.mean(brs)),
        k=s.k,
        epsilon=epsilon,
    )
