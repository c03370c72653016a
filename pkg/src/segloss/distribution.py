"""Cross-entropy family: BCE, weighted BCE, balanced BCE, focal loss, and
distance-map-penalized cross entropy.

All five are means over pixels of clamped log terms, so each is nonnegative
and bounded. Gradients are with respect to the probability map and include
the clamp (zero derivative where a pixel is clamped).
"""

from __future__ import annotations

import numpy as np

from .core import (
    ConfigError,
    DEFAULT_CONFIG,
    LossConfig,
    as_mask,
    as_prob,
    ce_grad_terms,
    ce_terms,
    check_same_shape,
    clamped_log_terms,
    reduce_mean,
    reduce_sum,
)


def _validated(y, p):
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return y, p


def bce(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Binary cross-entropy: mean of -log(p_t) with p_t = p if y=1 else 1-p."""
    y, p = _validated(y, p)
    return reduce_mean(ce_terms(y, p, cfg.epsilon))


def bce_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    return ce_grad_terms(y, p, cfg.epsilon) / y.size


def weighted_bce(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """BCE with the positive class weighted by beta.

    beta > 1 penalizes false negatives harder; beta < 1 penalizes false
    positives. beta = 1 reduces to plain bce exactly.
    """
    y, p = _validated(y, p)
    if cfg.beta <= 0.0:
        raise ConfigError(f"weighted_bce requires beta > 0, got {cfg.beta}")
    _, _, log_p, log_q, _ = clamped_log_terms(y, p, cfg.epsilon)
    return reduce_mean(-(cfg.beta * y * log_p + (1.0 - y) * log_q))


def weighted_bce_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    if cfg.beta <= 0.0:
        raise ConfigError(f"weighted_bce requires beta > 0, got {cfg.beta}")
    pc, qc, _, _, inside = clamped_log_terms(y, p, cfg.epsilon)
    return inside * (-(cfg.beta * y / pc) + (1.0 - y) / qc) / y.size


def foreground_weight(y: np.ndarray) -> float:
    """Balanced-CE weight: one minus the foreground fraction of the mask."""
    return 1.0 - reduce_sum(y) / y.size


def balanced_bce(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """BCE with the positive class weighted by 1 - fg_fraction and the
    negative class by fg_fraction."""
    y, p = _validated(y, p)
    beta = foreground_weight(y)
    _, _, log_p, log_q, _ = clamped_log_terms(y, p, cfg.epsilon)
    return reduce_mean(-(beta * y * log_p + (1.0 - beta) * (1.0 - y) * log_q))


def balanced_bce_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    beta = foreground_weight(y)
    pc, qc, _, _, inside = clamped_log_terms(y, p, cfg.epsilon)
    return inside * (-(beta * y / pc) + (1.0 - beta) * (1.0 - y) / qc) / y.size


def _focal_pt(y: np.ndarray, p: np.ndarray, epsilon: float):
    pc, qc, _, _, inside = clamped_log_terms(y, p, epsilon)
    pt = np.where(y == 1.0, pc, qc)
    return pt, inside


def _focal_alpha(y: np.ndarray, cfg: LossConfig):
    if cfg.alpha_balanced:
        return np.where(y == 1.0, cfg.alpha, 1.0 - cfg.alpha)
    return cfg.alpha


def focal(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Focal loss: mean of -alpha * (1 - p_t)^gamma * log(p_t).

    gamma down-weights confidently-correct pixels; gamma = 0 with alpha = 1
    is exactly bce.
    """
    y, p = _validated(y, p)
    if cfg.gamma < 0.0:
        raise ConfigError(f"focal requires gamma >= 0, got {cfg.gamma}")
    pt, _ = _focal_pt(y, p, cfg.epsilon)
    alpha = _focal_alpha(y, cfg)
    return reduce_mean(-alpha * (1.0 - pt) ** cfg.gamma * np.log(pt))


def focal_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    if cfg.gamma < 0.0:
        raise ConfigError(f"focal requires gamma >= 0, got {cfg.gamma}")
    pt, inside = _focal_pt(y, p, cfg.epsilon)
    alpha = _focal_alpha(y, cfg)
    g = cfg.gamma
    one_minus = 1.0 - pt
    # d/dp_t of -(1-p_t)^g * log(p_t); the g=0 branch avoids 0 * inf at p_t -> 1
    if g == 0.0:
        d_pt = -1.0 / pt
    else:
        d_pt = g * one_minus ** (g - 1.0) * np.log(pt) - one_minus**g / pt
    direction = 2.0 * y - 1.0
    return alpha * d_pt * direction * inside / y.size


def distance_penalized_ce(y, p, phi, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Cross entropy scaled per pixel by 1 + phi, phi a nonnegative distance map.

    Pixels far from the ground-truth boundary cost more when wrong; phi = 0
    everywhere reduces to plain bce.
    """
    y, p = _validated(y, p)
    phi = _validated_phi(phi, y)
    return reduce_mean((1.0 + phi) * ce_terms(y, p, cfg.epsilon))


def distance_penalized_ce_grad(y, p, phi, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    phi = _validated_phi(phi, y)
    return (1.0 + phi) * ce_grad_terms(y, p, cfg.epsilon) / y.size


def _validated_phi(phi, y: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    check_same_shape(y, phi)
    if not np.all(phi >= 0.0):
        raise ValueError("distance map values must be >= 0")
    return phi
