"""Shared grid plumbing: validation, clamping, soft confusion counts, reductions.

All grids are 2D row-major float64 numpy arrays. Reductions accumulate
sequentially in row-major order so results are bit-reproducible regardless
of how callers parallelize around them.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

# Desk-scale guard: refuse grids larger than 2^26 pixels.
MAX_PIXELS = 1 << 26


class ShapeError(ValueError):
    """Grid dimensions are invalid or two grids disagree in shape."""


class ConfigError(ValueError):
    """A loss configuration value is outside its permitted range."""


def validate_shape(height: int, width: int) -> tuple[int, int]:
    if height < 1 or width < 1:
        raise ShapeError(f"grid dimensions must be >= 1, got {height}x{width}")
    if height * width > MAX_PIXELS:
        raise ShapeError(
            f"grid {height}x{width} exceeds the {MAX_PIXELS}-pixel desk-scale limit"
        )
    return int(height), int(width)


def as_grid(values) -> np.ndarray:
    """Coerce to a 2D float64 array and apply the size guard."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2D grid, got {arr.ndim} dimensions")
    validate_shape(*arr.shape)
    return np.ascontiguousarray(arr)


def as_mask(values) -> np.ndarray:
    """Validate a ground-truth mask: every value exactly 0 or 1."""
    arr = as_grid(values)
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError("mask values must be exactly 0 or 1")
    return arr


def as_prob(values) -> np.ndarray:
    """Validate a probability map: every value in [0, 1]."""
    arr = as_grid(values)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValueError("probability values must lie in [0, 1]")
    return arr


def as_logits(values) -> np.ndarray:
    """Validate a logit map: every value finite."""
    arr = as_grid(values)
    if not np.all(np.isfinite(arr)):
        raise ValueError("logit values must be finite")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class LossConfig:
    """Tunable coefficients shared by all loss functions.

    epsilon        probability clamp applied inside every log-consuming loss
    smooth         additive constant in Dice/Tversky numerator and denominator
    beta           WCE positive-class weight / Tversky FP-FN tradeoff /
                   structural-similarity threshold fraction (default suits the
                   structural threshold; set explicitly for WCE and Tversky)
    alpha          focal weight / Combo CE-vs-Dice mix
    gamma          focusing exponent (focal, focal Tversky, exp-log)
    w              sensitivity-vs-specificity weight
    w_dice, w_cross  exp-log term weights
    w_label        exp-log cross-term label weight
    c4             structural-similarity stability factor
    window         structural-similarity local window side (odd)
    hd_alpha       Hausdorff distance-transform exponent
    alpha_balanced focal: apply alpha to foreground and 1-alpha to background
    shape_aware_per_pixel  shape-aware: weight each pixel by its boundary
                   distance instead of one scalar curve distance
    """

    epsilon: float = 1e-7
    smooth: float = 1.0
    beta: float = 0.1
    alpha: float = 0.5
    gamma: float = 2.0
    w: float = 0.5
    w_dice: float = 1.0
    w_cross: float = 1.0
    w_label: float = 1.0
    c4: float = 0.01
    window: int = 3
    hd_alpha: float = 2.0
    alpha_balanced: bool = False
    shape_aware_per_pixel: bool = False

    def validate(self) -> "LossConfig":
        if not (0.0 < self.epsilon < 0.5):
            raise ConfigError(f"epsilon must be in (0, 0.5), got {self.epsilon}")
        if self.smooth < 0.0:
            raise ConfigError(f"smooth must be >= 0, got {self.smooth}")
        if not (self.beta > 0.0) or not math.isfinite(self.beta):
            raise ConfigError(f"beta must be in (0, inf), got {self.beta}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.gamma < 0.0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if not (0.0 <= self.w <= 1.0):
            raise ConfigError(f"w must be in [0, 1], got {self.w}")
        if self.w_dice < 0.0 or self.w_cross < 0.0:
            raise ConfigError("w_dice and w_cross must be >= 0")
        if self.w_label < 0.0:
            raise ConfigError(f"w_label must be >= 0, got {self.w_label}")
        if self.c4 <= 0.0:
            raise ConfigError(f"c4 must be > 0, got {self.c4}")
        if self.window < 1 or self.window % 2 == 0:
            raise ConfigError(f"window must be an odd positive integer, got {self.window}")
        if self.hd_alpha < 1.0:
            raise ConfigError(f"hd_alpha must be >= 1, got {self.hd_alpha}")
        return self

    def replace(self, **overrides) -> "LossConfig":
        return dataclasses.replace(self, **overrides).validate()


DEFAULT_CONFIG = LossConfig()


@dataclass(frozen=True)
class SoftConfusion:
    """Differentiable confusion counts computed from probabilities."""

    tp: float
    fp: float
    tn: float
    fn: float

    @property
    def total(self) -> float:
        return self.tp + self.fp + self.tn + self.fn


def clamp_prob(p, epsilon: float = DEFAULT_CONFIG.epsilon) -> np.ndarray:
    """Clamp probabilities into [epsilon, 1-epsilon]; interior values pass through."""
    if not (0.0 < epsilon < 0.5):
        raise ConfigError(f"epsilon must be in (0, 0.5), got {epsilon}")
    return np.clip(np.asarray(p, dtype=np.float64), epsilon, 1.0 - epsilon)


def sigmoid(z) -> np.ndarray:
    """Numerically stable logistic function 1 / (1 + exp(-z))."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def reduce_sum(grid) -> float:
    """Sum in fixed row-major order; bit-reproducible across runs and threads."""
    arr = np.asarray(grid, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot reduce an empty grid")
    total = 0.0
    for v in arr.ravel(order="C").tolist():
        total += v
    return total


def reduce_mean(grid) -> float:
    arr = np.asarray(grid, dtype=np.float64)
    return reduce_sum(arr) / arr.size


def soft_confusion(y, p) -> SoftConfusion:
    """Soft counts tp = sum(y*p), fp = sum((1-y)*p), fn = sum(y*(1-p)), tn = rest."""
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return SoftConfusion(
        tp=reduce_sum(y * p),
        fp=reduce_sum((1.0 - y) * p),
        tn=reduce_sum((1.0 - y) * (1.0 - p)),
        fn=reduce_sum(y * (1.0 - p)),
    )


def clamped_log_terms(y: np.ndarray, p: np.ndarray, epsilon: float):
    """Shared clamped quantities for every log-consuming loss.

    Returns (p_clamped, q_clamped, log_p, log_q, inside) where q = 1 - p_clamped
    and inside flags pixels whose clamp derivative is 1. Every loss must build
    its log terms from these arrays so that reduction identities between losses
    hold bitwise.
    """
    pc = clamp_prob(p, epsilon)
    qc = 1.0 - pc
    inside = ((p >= epsilon) & (p <= 1.0 - epsilon)).astype(np.float64)
    return pc, qc, np.log(pc), np.log(qc), inside


def ce_terms(y: np.ndarray, p: np.ndarray, epsilon: float) -> np.ndarray:
    """Per-pixel cross-entropy -(y*log(p~) + (1-y)*log(1-p~)) on clamped p."""
    _, _, log_p, log_q, _ = clamped_log_terms(y, p, epsilon)
    return -(y * log_p + (1.0 - y) * log_q)


def ce_grad_terms(y: np.ndarray, p: np.ndarray, epsilon: float) -> np.ndarray:
    """Per-pixel derivative of ce_terms with respect to p (clamp included)."""
    pc, qc, _, _, inside = clamped_log_terms(y, p, epsilon)
    return inside * (-(y / pc) + (1.0 - y) / qc)
