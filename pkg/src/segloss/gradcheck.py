"""Loss registry with analytic gradients and a central finite-difference
verification oracle.

Every loss is registered as a (prepare, value, grad) triple. prepare computes
the frozen coefficients (distance maps, curve distances, structural weights)
from the unperturbed prediction; value and grad both receive that frozen
state, so finite differences and analytic gradients differentiate exactly the
same function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import boundary, compound, distribution, region
from .core import DEFAULT_CONFIG, LossConfig, as_mask, as_prob, check_same_shape
from .geometry import distance_transform, extract_boundary


@dataclass(frozen=True)
class RegisteredLoss:
    name: str
    prepare: Callable
    value: Callable
    grad: Callable
    needs_aux: bool = False


def _no_prepare(y, p, cfg, aux):
    return None


def _simple(name: str, value_fn, grad_fn) -> RegisteredLoss:
    return RegisteredLoss(
        name=name,
        prepare=_no_prepare,
        value=lambda y, p, cfg, frozen: value_fn(y, p, cfg),
        grad=lambda y, p, cfg, frozen: grad_fn(y, p, cfg),
    )


def _prepare_phi(y, p, cfg, aux):
    if aux is None:
        raise ValueError("distance_penalized_ce requires a distance map (aux)")
    return aux


def _prepare_hausdorff(y, p, cfg, aux):
    return boundary.hausdorff_dt_weights(y, p, cfg)


def _prepare_shape(y, p, cfg, aux):
    return boundary.shape_coefficient(y, p, cfg)


def _prepare_ssl(y, p, cfg, aux):
    return compound.ssl_coefficients(y, p, cfg)


LOSSES: dict[str, RegisteredLoss] = {
    loss.name: loss
    for loss in [
        _simple("bce", distribution.bce, distribution.bce_grad),
        _simple("weighted_bce", distribution.weighted_bce, distribution.weighted_bce_grad),
        _simple("balanced_bce", distribution.balanced_bce, distribution.balanced_bce_grad),
        _simple("focal", distribution.focal, distribution.focal_grad),
        RegisteredLoss(
            name="distance_penalized_ce",
            prepare=_prepare_phi,
            value=lambda y, p, cfg, phi: distribution.distance_penalized_ce(y, p, phi, cfg),
            grad=lambda y, p, cfg, phi: distribution.distance_penalized_ce_grad(y, p, phi, cfg),
            needs_aux=True,
        ),
        _simple("dice", region.dice_loss, region.dice_loss_grad),
        _simple("tversky", region.tversky_loss, region.tversky_loss_grad),
        _simple("focal_tversky", region.focal_tversky_loss, region.focal_tversky_loss_grad),
        _simple(
            "sens_spec",
            region.sensitivity_specificity_loss,
            region.sensitivity_specificity_loss_grad,
        ),
        _simple("log_cosh_dice", region.log_cosh_dice_loss, region.log_cosh_dice_loss_grad),
        RegisteredLoss(
            name="hausdorff_dt",
            prepare=_prepare_hausdorff,
            value=lambda y, p, cfg, w: boundary.hausdorff_dt_loss_given(y, p, w),
            grad=lambda y, p, cfg, w: boundary.hausdorff_dt_loss_given_grad(y, p, w),
        ),
        RegisteredLoss(
            name="shape_aware",
            prepare=_prepare_shape,
            value=lambda y, p, cfg, c: boundary.shape_aware_loss_given(y, p, c, cfg),
            grad=lambda y, p, cfg, c: boundary.shape_aware_loss_given_grad(y, p, c, cfg),
        ),
        _simple("combo", compound.combo_loss, compound.combo_loss_grad),
        _simple("exp_log", compound.exp_log_loss, compound.exp_log_loss_grad),
        RegisteredLoss(
            name="ssl",
            prepare=_prepare_ssl,
            value=lambda y, p, cfg, c: compound.ssl_loss_given(y, p, c, cfg),
            grad=lambda y, p, cfg, c: compound.ssl_loss_given_grad(y, p, c, cfg),
        ),
    ]
}

LOSS_IDS: tuple[str, ...] = tuple(LOSSES)


def _assert_registry_complete() -> None:
    for name, loss in LOSSES.items():
        if not callable(loss.value) or not callable(loss.grad) or not callable(loss.prepare):
            raise AssertionError(f"loss {name!r} is missing an implementation")
    if len(LOSS_IDS) != 15:
        raise AssertionError(f"expected 15 registered losses, found {len(LOSS_IDS)}")


_assert_registry_complete()


def _checked(name: str) -> RegisteredLoss:
    if name not in LOSSES:
        raise KeyError(f"unknown loss {name!r}; valid names: {', '.join(LOSS_IDS)}")
    return LOSSES[name]


def _validated(y, p):
    y = as_mask(y)
    p = as_prob(p)
    check_same_shape(y, p)
    return y, p


def loss_value(name: str, y, p, cfg: LossConfig = DEFAULT_CONFIG, aux=None) -> float:
    """Evaluate a loss by canonical name; aux carries the distance map for
    distance_penalized_ce."""
    loss = _checked(name)
    y, p = _validated(y, p)
    frozen = loss.prepare(y, p, cfg, aux)
    return loss.value(y, p, cfg, frozen)


def analytic_gradient(name: str, y, p, cfg: LossConfig = DEFAULT_CONFIG, aux=None) -> np.ndarray:
    """Closed-form d(loss)/dp per pixel with frozen geometry coefficients."""
    loss = _checked(name)
    y, p = _validated(y, p)
    frozen = loss.prepare(y, p, cfg, aux)
    return loss.grad(y, p, cfg, frozen)


def central_difference(func: Callable[[np.ndarray], float], p: np.ndarray, h: float) -> np.ndarray:
    """Per-pixel central difference (f(p + h*e_i) - f(p - h*e_i)) / (2h)."""
    p = np.asarray(p, dtype=np.float64)
    out = np.empty_like(p)
    flat = out.reshape(-1)
    work = p.copy().reshape(-1)
    for i in range(work.size):
        orig = work[i]
        work[i] = orig + h
        plus = func(work.reshape(p.shape))
        work[i] = orig - h
        minus = func(work.reshape(p.shape))
        work[i] = orig
        flat[i] = (plus - minus) / (2.0 * h)
    return out


def finite_diff_gradient(
    name: str, y, p, cfg: LossConfig = DEFAULT_CONFIG, aux=None, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient with frozen coefficients taken from the
    unperturbed prediction, matching the analytic gradient's contract."""
    loss = _checked(name)
    y, p = _validated(y, p)
    frozen = loss.prepare(y, p, cfg, aux)
    return central_difference(lambda q: loss.value(y, q, cfg, frozen), p, h)


@dataclass(frozen=True)
class GradCheckResult:
    loss: str
    max_rel_error: float
    max_abs_error: float
    worst_pixel: tuple[int, int]
    passed: bool


MAGNITUDE_FLOOR = 1e-6


def compare_gradients(
    name: str,
    analytic: np.ndarray,
    numeric: np.ndarray,
    tol: float,
    abs_floor: float = 1e-8,
) -> GradCheckResult:
    """Pixels with gradient magnitude >= 1e-6 must agree to relative tol;
    smaller ones to absolute abs_floor."""
    diff = np.abs(analytic - numeric)
    mag = np.maximum(np.abs(analytic), np.abs(numeric))
    big = mag >= MAGNITUDE_FLOOR
    rel = np.where(big, diff / np.where(big, mag, 1.0), 0.0)
    badness = np.where(big, rel / tol if tol > 0 else np.inf, diff / abs_floor)
    worst_flat = int(np.argmax(badness))
    worst = np.unravel_index(worst_flat, analytic.shape)
    max_rel = float(np.max(rel)) if big.any() else 0.0
    return GradCheckResult(
        loss=name,
        max_rel_error=max_rel,
        max_abs_error=float(np.max(diff)),
        worst_pixel=(int(worst[0]), int(worst[1])),
        passed=bool(np.all(badness < 1.0)),
    )


def normalized_phi(y: np.ndarray) -> np.ndarray:
    """Boundary distance map of a mask scaled into [0, 1] by its maximum."""
    pixels = extract_boundary(y)
    if len(pixels) == 0:
        return np.zeros(y.shape, dtype=np.float64)
    phi = distance_transform(y.shape, pixels)
    top = float(np.max(phi))
    return phi / top if top > 0 else phi


def run_gradcheck(
    ids: Optional[Sequence[str]] = None,
    seed: int = 0,
    size: tuple[int, int] = (8, 8),
    tol: float = 1e-5,
    abs_floor: float = 1e-8,
    cfg: LossConfig = DEFAULT_CONFIG,
    h: float = 1e-5,
) -> list[GradCheckResult]:
    """Check analytic against numeric gradients for each loss on one random
    instance: fair-coin mask, prediction uniform in [0.2, 0.8]."""
    if size[0] < 2 or size[1] < 2:
        raise ValueError(f"gradcheck needs at least a 2x2 grid, got {size}")
    names = list(ids) if ids is not None else list(LOSS_IDS)
    for name in names:
        _checked(name)
    rng = np.random.default_rng(seed)
    y = (rng.random(size) < 0.5).astype(np.float64)
    p = rng.uniform(0.2, 0.8, size)
    results = []
    for name in names:
        aux = normalized_phi(y) if LOSSES[name].needs_aux else None
        analytic = analytic_gradient(name, y, p, cfg, aux)
        numeric = finite_diff_gradient(name, y, p, cfg, aux, h)
        results.append(compare_gradients(name, analytic, numeric, tol, abs_floor))
    return results
