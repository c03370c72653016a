"""Boundary-aware losses: distance-transform-weighted squared error and
curve-distance-scaled cross entropy.

Distance maps and curve distances are frozen coefficients: they are computed
from the current prediction but treated as constants when differentiating
(boundary extraction and thresholding are not smooth).
"""

from __future__ import annotations

import warnings

import numpy as np

from .core import (
    DEFAULT_CONFIG,
    LossConfig,
    as_mask,
    as_prob,
    ce_grad_terms,
    ce_terms,
    check_same_shape,
    reduce_mean,
)
from .geometry import distance_transform, extract_boundary, mean_point_to_set_distance


def _validated(y, p):
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return y, p


def threshold_mask(p: np.ndarray, threshold: float) -> np.ndarray:
    """Binarize a prediction for boundary purposes; ties go to background."""
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    return (p > threshold).astype(np.float64)


def boundary_distance_map(mask: np.ndarray) -> np.ndarray:
    """Distance to the mask's boundary; all zeros when the boundary is empty."""
    boundary = extract_boundary(mask)
    if len(boundary) == 0:
        return np.zeros(mask.shape, dtype=np.float64)
    return distance_transform(mask.shape, boundary)


def hausdorff_dt_weights(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
) -> np.ndarray:
    """Frozen weight map d_truth^alpha + d_pred^alpha from the two boundaries."""
    y, p = _validated(y, p)
    d_truth = boundary_distance_map(y)
    d_pred = boundary_distance_map(threshold_mask(p, threshold))
    return d_truth**cfg.hd_alpha + d_pred**cfg.hd_alpha


def hausdorff_dt_loss_given(y, p, weights: np.ndarray) -> float:
    diff = p - y
    return reduce_mean(diff * diff * weights)


def hausdorff_dt_loss_given_grad(y, p, weights: np.ndarray) -> np.ndarray:
    return 2.0 * (p - y) * weights / y.size


def hausdorff_dt_loss(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
) -> float:
    """Mean of (p - y)^2 weighted by boundary-distance powers of both masks.

    Matching binary predictions cost nothing; errors cost more the farther
    they sit from either boundary. An empty boundary contributes zero weight.
    """
    y, p = _validated(y, p)
    return hausdorff_dt_loss_given(y, p, hausdorff_dt_weights(y, p, cfg, threshold))


def hausdorff_dt_loss_grad(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
) -> np.ndarray:
    y, p = _validated(y, p)
    return hausdorff_dt_loss_given_grad(y, p, hausdorff_dt_weights(y, p, cfg, threshold))


def shape_coefficient(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
):
    """Frozen cross-entropy coefficient for the shape-aware loss.

    Scalar mode returns the mean distance from the predicted boundary to the
    true boundary; per-pixel mode returns the truth-boundary distance map.
    An empty true boundary falls back to plain cross entropy (coefficient 0)
    with a warning; an empty predicted boundary contributes no distance.
    """
    y, p = _validated(y, p)
    truth_boundary = extract_boundary(y)
    if len(truth_boundary) == 0:
        warnings.warn(
            "shape_aware: empty ground-truth boundary, falling back to bce",
            stacklevel=2,
        )
        return 0.0
    if cfg.shape_aware_per_pixel:
        return distance_transform(y.shape, truth_boundary)
    pred_boundary = extract_boundary(threshold_mask(p, threshold))
    if len(pred_boundary) == 0:
        return 0.0
    return mean_point_to_set_distance(pred_boundary, truth_boundary)


def shape_aware_loss_given(y, p, coeff, cfg: LossConfig = DEFAULT_CONFIG) -> float:
    return reduce_mean((1.0 + coeff) * ce_terms(y, p, cfg.epsilon))


def shape_aware_loss_given_grad(y, p, coeff, cfg: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    return (1.0 + coeff) * ce_grad_terms(y, p, cfg.epsilon) / y.size


def shape_aware_loss(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
) -> float:
    """Cross entropy scaled by 1 plus the predicted-to-true curve distance."""
    y, p = _validated(y, p)
    coeff = shape_coefficient(y, p, cfg, threshold)
    return shape_aware_loss_given(y, p, coeff, cfg)


def shape_aware_loss_grad(
    y, p, cfg: LossConfig = DEFAULT_CONFIG, threshold: float = 0.5
) -> np.ndarray:
    y, p = _validated(y, p)
    coeff = shape_coefficient(y, p, cfg, threshold)
    return shape_aware_loss_given_grad(y, p, coeff, cfg)
