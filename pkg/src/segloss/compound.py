"""Combined and structural losses: Combo, exponential-logarithmic, and the
correlation-maximized structural similarity loss."""

from __future__ import annotations

import math

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
from .geometry import local_stats
from .region import dice_loss, dice_loss_grad


def _validated(y, p):
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return y, p


def _combo_checked(cfg: LossConfig) -> None:
    if not (0.0 <= cfg.alpha <= 1.0):
        raise ConfigError(f"combo requires alpha in [0, 1], got {cfg.alpha}")
    if not (0.0 <= cfg.beta <= 1.0):
        raise ConfigError(f"combo requires beta in [0, 1], got {cfg.beta}")


def modified_bce(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Class-weighted BCE term of the Combo loss."""
    y, p = _validated(y, p)
    _, _, log_p, log_q, _ = clamped_log_terms(y, p, cfg.epsilon)
    return reduce_mean(-(cfg.beta * y * log_p + (1.0 - cfg.beta) * (1.0 - y) * log_q))


def combo_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """alpha * weighted-BCE + (1 - alpha) * Dice loss."""
    _combo_checked(cfg)
    return cfg.alpha * modified_bce(y, p, cfg) + (1.0 - cfg.alpha) * dice_loss(y, p, cfg)


def combo_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    _combo_checked(cfg)
    y, p = _validated(y, p)
    pc, qc, _, _, inside = clamped_log_terms(y, p, cfg.epsilon)
    mbce_grad = inside * (-(cfg.beta * y / pc) + (1.0 - cfg.beta) * (1.0 - y) / qc) / y.size
    return cfg.alpha * mbce_grad + (1.0 - cfg.alpha) * dice_loss_grad(y, p, cfg)


def _exp_log_checked(cfg: LossConfig) -> None:
    if cfg.gamma <= 0.0:
        raise ConfigError(f"exp_log requires gamma > 0, got {cfg.gamma}")
    if cfg.w_dice < 0.0 or cfg.w_cross < 0.0 or cfg.w_label < 0.0:
        raise ConfigError("exp_log weights must be >= 0")


def _smoothed_dice_coefficient(y: np.ndarray, p: np.ndarray, cfg: LossConfig):
    overlap = reduce_sum(y * p)
    num = 2.0 * overlap + cfg.smooth
    den = reduce_sum(y) + reduce_sum(p) + cfg.smooth
    raw = num / den
    return min(max(raw, cfg.epsilon), 1.0), raw, den, num


def exp_log_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """w_dice * (-ln DC)^gamma + w_cross * mean(w_label * (-ln p_t)^gamma).

    Both the Dice coefficient and the per-pixel likelihoods pass through a log
    and a gamma power, steepening the penalty on poorly predicted structures.
    """
    _exp_log_checked(cfg)
    y, p = _validated(y, p)
    dc, _, _, _ = _smoothed_dice_coefficient(y, p, cfg)
    loss_dice = (-math.log(dc)) ** cfg.gamma
    _, _, log_p, log_q, _ = clamped_log_terms(y, p, cfg.epsilon)
    neg_log_pt = -np.where(y == 1.0, log_p, log_q)
    loss_cross = reduce_mean(cfg.w_label * neg_log_pt**cfg.gamma)
    return cfg.w_dice * loss_dice + cfg.w_cross * loss_cross


def exp_log_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    _exp_log_checked(cfg)
    y, p = _validated(y, p)
    dc, raw, den, num = _smoothed_dice_coefficient(y, p, cfg)
    d_dc = (2.0 * y * den - num) / (den * den)
    if raw < cfg.epsilon:
        d_dc = np.zeros_like(d_dc)
    neg_log_dc = -math.log(dc)
    grad_dice = cfg.gamma * neg_log_dc ** (cfg.gamma - 1.0) * (-1.0 / dc) * d_dc
    pc, qc, log_p, log_q, inside = clamped_log_terms(y, p, cfg.epsilon)
    pt = np.where(y == 1.0, pc, qc)
    neg_log_pt = -np.where(y == 1.0, log_p, log_q)
    direction = 2.0 * y - 1.0
    grad_cross = (
        cfg.w_label
        * cfg.gamma
        * neg_log_pt ** (cfg.gamma - 1.0)
        * (-1.0 / pt)
        * direction
        * inside
        / y.size
    )
    return cfg.w_dice * grad_dice + cfg.w_cross * grad_cross


def _ssl_checked(cfg: LossConfig) -> None:
    if not (0.0 <= cfg.beta <= 1.0):
        raise ConfigError(f"ssl requires beta in [0, 1], got {cfg.beta}")


def ssl_coefficients(y, p, cfg: LossConfig = DEFAULT_CONFIG):
    """Frozen structural coefficients (e, f, kept) for the SSL loss.

    e measures the local decorrelation between truth and prediction; f keeps
    only pixels whose e exceeds beta times the image maximum; kept counts them.
    """
    _ssl_checked(cfg)
    y, p = _validated(y, p)
    stats_y = local_stats(y, cfg.window)
    stats_p = local_stats(p, cfg.window)
    c4 = cfg.c4
    e = np.abs(
        (y - stats_y.mean + c4) / (stats_y.std + c4)
        - (p - stats_p.mean + c4) / (stats_p.std + c4)
    )
    e_max = float(np.max(e))
    f = (e > cfg.beta * e_max).astype(np.float64)
    kept = int(np.count_nonzero(f))
    return e, f, kept


def ssl_loss_given(y, p, coeffs, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    e, f, kept = coeffs
    if kept == 0:
        return 0.0
    return reduce_sum(e * f * ce_terms(y, p, cfg.epsilon)) / kept


def ssl_loss_given_grad(y, p, coeffs, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    e, f, kept = coeffs
    if kept == 0:
        return np.zeros_like(p)
    return e * f * ce_grad_terms(y, p, cfg.epsilon) / kept


def ssl_loss(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    """Structural similarity loss: cross entropy averaged over the pixels that
    break local truth/prediction correlation, weighted by how badly they do.

    A perfect prediction has e identically zero, keeps no pixels, and scores 0.
    """
    y, p = _validated(y, p)
    return ssl_loss_given(y, p, ssl_coefficients(y, p, cfg), cfg)


def ssl_loss_grad(y, p, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    y, p = _validated(y, p)
    return ssl_loss_given_grad(y, p, ssl_coefficients(y, p, cfg), cfg)
