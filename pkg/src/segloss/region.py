"""Overlap-based family: Dice, Tversky, focal Tversky, sensitivity-specificity,
and the log-cosh smoothed Dice loss."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .core import (
    ConfigError,
    DEFAULT_CONFIG,
    LossConfig,
    as_mask,
    as_prob,
    check_same_shape,
    reduce_sum,
    soft_confusion,
)


def _validated(y, p):
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return y, p


def _dice_fraction(y: np.ndarray, p: np.ndarray, smooth: float):
    """Numerator and denominator of the smoothed soft Dice coefficient."""
    if smooth < 0.0:
        raise ConfigError(f"smooth must be >= 0, got {smooth}")
    overlap = reduce_sum(y * p)
    total = reduce_sum(y) + reduce_sum(p)
    if smooth == 0.0 and total == 0.0:
        raise ValueError("dice is undefined for empty mask and prediction with smooth=0")
    return 2.0 * overlap + smooth, total + smooth


def dice_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Soft Dice loss 1 - (2*sum(y*p) + s) / (sum(y) + sum(p) + s)."""
    y, p = _validated(y, p)
    num, den = _dice_fraction(y, p, cfg.smooth)
    return 1.0 - num / den


def dice_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    num, den = _dice_fraction(y, p, cfg.smooth)
    return -(2.0 * y * den - num) / (den * den)


def _tversky_fraction(y: np.ndarray, p: np.ndarray, beta: float, smooth: float):
    if not (0.0 <= beta <= 1.0):
        raise ConfigError(f"tversky requires beta in [0, 1], got {beta}")
    if smooth < 0.0:
        raise ConfigError(f"smooth must be >= 0, got {smooth}")
    overlap = reduce_sum(y * p)
    false_pos = reduce_sum((1.0 - y) * p)
    false_neg = reduce_sum(y * (1.0 - p))
    num = overlap + smooth
    den = overlap + beta * false_pos + (1.0 - beta) * false_neg + smooth
    return num, den


def tversky_index(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    y, p = _validated(y, p)
    num, den = _tversky_fraction(y, p, cfg.beta, cfg.smooth)
    return num / den


def tversky_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Dice generalization weighting false positives by beta and false
    negatives by 1 - beta; beta = 1/2 recovers a Dice-style loss."""
    y, p = _validated(y, p)
    num, den = _tversky_fraction(y, p, cfg.beta, cfg.smooth)
    return 1.0 - num / den


def tversky_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    num, den = _tversky_fraction(y, p, cfg.beta, cfg.smooth)
    # d(den)/dp_i = beta for every pixel: y + beta(1-y) - (1-beta)y collapses.
    return -(y * den - num * cfg.beta) / (den * den)


def focal_tversky_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """(1 - Tversky index)^gamma, sharpening the penalty on poor overlap."""
    _check_focal_tversky_gamma(cfg.gamma)
    y, p = _validated(y, p)
    num, den = _tversky_fraction(y, p, cfg.beta, cfg.smooth)
    return (1.0 - num / den) ** cfg.gamma


def focal_tversky_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    _check_focal_tversky_gamma(cfg.gamma)
    y, p = _validated(y, p)
    num, den = _tversky_fraction(y, p, cfg.beta, cfg.smooth)
    tl = 1.0 - num / den
    d_tl = -(y * den - num * cfg.beta) / (den * den)
    return cfg.gamma * tl ** (cfg.gamma - 1.0) * d_tl


def _check_focal_tversky_gamma(gamma: float) -> None:
    if not (1.0 <= gamma <= 3.0):
        warnings.warn(
            f"focal tversky gamma={gamma} is outside the recommended [1, 3] range",
            stacklevel=3,
        )


def sensitivity_specificity_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """1 - (w * soft sensitivity + (1-w) * soft specificity)."""
    if not (0.0 <= cfg.w <= 1.0):
        raise ConfigError(f"sens_spec requires w in [0, 1], got {cfg.w}")
    counts = soft_confusion(y, p)
    sens = counts.tp / (counts.tp + counts.fn + cfg.epsilon)
    spec = counts.tn / (counts.tn + counts.fp + cfg.epsilon)
    return 1.0 - (cfg.w * sens + (1.0 - cfg.w) * spec)


def sensitivity_specificity_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    if not (0.0 <= cfg.w <= 1.0):
        raise ConfigError(f"sens_spec requires w in [0, 1], got {cfg.w}")
    y, p = _validated(y, p)
    counts = soft_confusion(y, p)
    sens_den = counts.tp + counts.fn + cfg.epsilon
    spec_den = counts.tn + counts.fp + cfg.epsilon
    return -(cfg.w * y / sens_den - (1.0 - cfg.w) * (1.0 - y) / spec_den)


def log_cosh(x: float) -> float:
    """log(cosh(x)) evaluated as |x| + log1p(exp(-2|x|)) - log(2)."""
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def log_cosh_dice_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """log(cosh(dice loss)): a smooth, bounded-slope surrogate for Dice."""
    return log_cosh(dice_loss(y, p, cfg))


def log_cosh_dice_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    # Chain rule: d/dx log(cosh(x)) = tanh(x).
    return math.tanh(dice_loss(y, p, cfg)) * dice_loss_grad(y, p, cfg)
