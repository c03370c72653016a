"""Desk-scale optimization harness: gradient descent on per-pixel logits under
any registered loss against synthetic masks, recording Dice/sensitivity/
specificity traces."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_CONFIG, LossConfig, as_mask, sigmoid, validate_shape
from .gradcheck import LOSSES, normalized_phi, _checked
from .metrics import binarize, dice_coefficient, sensitivity, specificity

MASK_KINDS = ("disk", "rectangle", "two_disks", "sparse")


@dataclass(frozen=True)
class SyntheticMaskSpec:
    """Deterministic synthetic ground truth: disk, rectangle, two_disks, or
    sparse(fraction) scattered pixels."""

    kind: str
    shape: tuple[int, int]
    seed: int = 0
    radius_frac: float = 0.3
    height_frac: float = 0.5
    width_frac: float = 0.5
    fraction: float = 0.01

    def label(self) -> str:
        h, w = self.shape
        if self.kind == "sparse":
            return f"sparse{self.fraction:g}_{h}x{w}"
        return f"{self.kind}_{h}x{w}"


def _disk(h: int, w: int, center: tuple[float, float], radius: float) -> np.ndarray:
    if radius <= 0:
        raise ValueError(f"disk radius must be > 0, got {radius}")
    rows = np.arange(h, dtype=np.float64)[:, None]
    cols = np.arange(w, dtype=np.float64)[None, :]
    dist = np.sqrt((rows - center[0]) ** 2 + (cols - center[1]) ** 2)
    return (dist <= radius).astype(np.float64)


def generate_mask(spec: SyntheticMaskSpec) -> np.ndarray:
    h, w = validate_shape(*spec.shape)
    if spec.kind == "disk":
        radius = spec.radius_frac * min(h, w)
        return as_mask(_disk(h, w, ((h - 1) / 2.0, (w - 1) / 2.0), radius))
    if spec.kind == "rectangle":
        bh = max(1, int(round(h * spec.height_frac)))
        bw = max(1, int(round(w * spec.width_frac)))
        r0 = (h - bh) // 2
        c0 = (w - bw) // 2
        mask = np.zeros((h, w), dtype=np.float64)
        mask[r0 : r0 + bh, c0 : c0 + bw] = 1.0
        return as_mask(mask)
    if spec.kind == "two_disks":
        radius = spec.radius_frac * min(h, w) / 2.0
        a = _disk(h, w, (h / 3.0, w / 3.0), radius)
        b = _disk(h, w, (2.0 * h / 3.0, 2.0 * w / 3.0), radius)
        return as_mask(np.maximum(a, b))
    if spec.kind == "sparse":
        count = int(round(spec.fraction * h * w))
        rng = np.random.default_rng(spec.seed)
        chosen = rng.choice(h * w, size=count, replace=False)
        mask = np.zeros(h * w, dtype=np.float64)
        mask[chosen] = 1.0
        return as_mask(mask.reshape(h, w))
    raise ValueError(f"unknown mask kind {spec.kind!r}; valid kinds: {', '.join(MASK_KINDS)}")


INIT_MODES = ("zeros", "random_uniform")


@dataclass(frozen=True)
class FitConfig:
    loss: str
    steps: int = 500
    learning_rate: float = 0.5
    seed: int = 0
    init: str = "zeros"
    record_every: int = 1

    def validate(self) -> "FitConfig":
        _checked(self.loss)
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        return self


@dataclass(frozen=True)
class TraceRow:
    step: int
    loss: float
    dice: float
    sensitivity: float
    specificity: float


@dataclass
class FitTrace:
    loss_name: str
    rows: list[TraceRow] = field(default_factory=list)
    diverged: bool = False

    def final(self) -> TraceRow:
        return self.rows[-1]

    def steps_to_reach(self, dice_threshold: float) -> Optional[int]:
        """First recorded step whose Dice coefficient meets the threshold."""
        for row in self.rows:
            if row.dice >= dice_threshold:
                return row.step
        return None


def _evaluate(loss, y, p, cfg, aux) -> float:
    return loss.value(y, p, cfg, loss.prepare(y, p, cfg, aux))


def fit(truth, fit_cfg: FitConfig, loss_cfg: LossConfig = DEFAULT_CONFIG) -> FitTrace:
    """Gradient descent on logits: z <- z - lr * dL/dp * p * (1 - p).

    Frozen coefficients (distance maps, curve distances, structural weights)
    are recomputed each step from the current prediction. Deterministic for a
    given config; a non-finite loss truncates the trace with diverged=True.
    """
    fit_cfg = fit_cfg.validate()
    y = as_mask(truth)
    loss = LOSSES[fit_cfg.loss]
    aux = normalized_phi(y) if loss.needs_aux else None
    if fit_cfg.init == "zeros":
        z = np.zeros_like(y)
    else:
        rng = np.random.default_rng(fit_cfg.seed)
        z = rng.uniform(-0.1, 0.1, size=y.shape)
    trace = FitTrace(loss_name=fit_cfg.loss)

    def record(step: int, p: np.ndarray, value: float) -> None:
        hard = binarize(p)
        trace.rows.append(
            TraceRow(
                step=step,
                loss=value,
                dice=dice_coefficient(hard, y),
                sensitivity=sensitivity(hard, y),
                specificity=specificity(hard, y),
            )
        )

    p = sigmoid(z)
    value = _evaluate(loss, y, p, loss_cfg, aux)
    record(0, p, value)
    for step in range(1, fit_cfg.steps + 1):
        frozen = loss.prepare(y, p, loss_cfg, aux)
        grad_p = loss.grad(y, p, loss_cfg, frozen)
        z = z - fit_cfg.learning_rate * grad_p * p * (1.0 - p)
        p = sigmoid(z)
        value = _evaluate(loss, y, p, loss_cfg, aux)
        if not math.isfinite(value):
            trace.diverged = True
            break
        if step % fit_cfg.record_every == 0 or step == fit_cfg.steps:
            record(step, p, value)
    return trace


@dataclass(frozen=True)
class ReportRow:
    loss: str
    mask: str
    dice: float
    sensitivity: float
    specificity: float
    diverged: bool


@dataclass
class LossReport:
    rows: list[ReportRow] = field(default_factory=list)


def _worker_count() -> int:
    raw = os.environ.get("SEGLOSS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_matrix(
    losses: Sequence[str],
    specs: Sequence[SyntheticMaskSpec],
    fit_cfg: FitConfig,
    loss_cfg: LossConfig = DEFAULT_CONFIG,
) -> tuple[LossReport, list[FitTrace]]:
    """One fit per (loss, mask) pair; rows keep input order regardless of the
    SEGLOSS_THREADS parallelism cap."""
    if not losses or not specs:
        raise ValueError("run_matrix needs at least one loss and one mask spec")
    jobs = [(name, spec) for name in losses for spec in specs]

    def run(job):
        name, spec = job
        truth = generate_mask(spec)
        trace = fit(truth, replace(fit_cfg, loss=name).validate(), loss_cfg)
        last = trace.final()
        row = ReportRow(
            loss=name,
            mask=spec.label(),
            dice=last.dice,
            sensitivity=last.sensitivity,
            specificity=last.specificity,
            diverged=trace.diverged,
        )
        return row, trace

    workers = _worker_count()
    if workers == 1:
        outcomes = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs))
    report = LossReport(rows=[row for row, _ in outcomes])
    return report, [trace for _, trace in outcomes]
