"""Hard-threshold evaluation metrics: Dice coefficient, sensitivity,
specificity over integer confusion counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_mask, as_prob, check_same_shape


@dataclass(frozen=True)
class HardConfusion:
    """Pixel counts at a binarization threshold; always sums to H*W."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def binarize(p, threshold: float = 0.5) -> np.ndarray:
    """Threshold a probability map; ties (p == threshold) go to foreground."""
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    p = as_prob(p)
    return (p >= threshold).astype(np.float64)


def hard_confusion(pred, truth) -> HardConfusion:
    pred = as_mask(pred)
    truth = as_mask(truth)
    check_same_shape(pred, truth)
    pred_fg = pred == 1.0
    truth_fg = truth == 1.0
    return HardConfusion(
        tp=int(np.count_nonzero(pred_fg & truth_fg)),
        fp=int(np.count_nonzero(pred_fg & ~truth_fg)),
        tn=int(np.count_nonzero(~pred_fg & ~truth_fg)),
        fn=int(np.count_nonzero(~pred_fg & truth_fg)),
    )


def dice_coefficient(pred, truth) -> float:
    """2TP / (2TP + FP + FN); two empty masks agree perfectly (1.0)."""
    c = hard_confusion(pred, truth)
    den = 2 * c.tp + c.fp + c.fn
    if den == 0:
        return 1.0
    return 2.0 * c.tp / den


def sensitivity(pred, truth) -> float:
    """TP / (TP + FN); vacuously 1.0 when the truth has no foreground."""
    c = hard_confusion(pred, truth)
    den = c.tp + c.fn
    if den == 0:
        return 1.0
    return c.tp / den


def specificity(pred, truth) -> float:
    """TN / (TN + FP); vacuously 1.0 when the truth has no background."""
    c = hard_confusion(pred, truth)
    den = c.tn + c.fp
    if den == 0:
        return 1.0
    return c.tn / den
