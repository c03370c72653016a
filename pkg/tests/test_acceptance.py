"""Acceptance suite: one test per release criterion, each printing a
[ACCEPTANCE] pass/fail line (run with -s to see them).

Tolerances are fixed here and nowhere else:
  * gradient verification: relative 1e-5, absolute floor 1e-8, 100 seeds, <60 s
  * reduction identities: 1e-12 over 100 random inputs
  * log-cosh chain rule: 1e-12 pixelwise
  * geometry: exact equality against brute-force oracles
  * metrics: hand-counted confusion, complementarity 1e-9
  * convergence: hard Dice >= 0.99 on a 32x32 disk within 500 steps, <120 s
  * imbalance probe: region losses >= 0.95 on sparse(0.01) within 1000 steps
  * determinism: byte-identical CLI reruns
"""

import math
import time

import numpy as np
import pytest

from segloss.cli import main
from segloss.core import LossConfig
from segloss.distribution import bce, distance_penalized_ce, focal, weighted_bce
from segloss.formats import serialize_grid, serialize_mask
from segloss.geometry import PixelSet, distance_transform, extract_boundary
from segloss.geometry import hausdorff_distance, mean_point_to_set_distance
from segloss.gradcheck import analytic_gradient, run_gradcheck
from segloss.harness import FitConfig, SyntheticMaskSpec, fit, generate_mask
from segloss.metrics import binarize, dice_coefficient, hard_confusion
from segloss.compound import combo_loss, exp_log_loss
from segloss.region import (
    dice_loss,
    focal_tversky_loss,
    log_cosh_dice_loss,
    tversky_loss,
)

CFG = LossConfig()

TABLE_LOSSES = (
    "bce",
    "weighted_bce",
    "balanced_bce",
    "focal",
    "dice",
    "tversky",
    "focal_tversky",
    "sens_spec",
    "exp_log",
    "log_cosh_dice",
)

REGION_LOSSES = ("dice", "tversky", "focal_tversky", "log_cosh_dice")


def _report(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {name}: {status}{suffix}")
    assert passed, f"{name}{suffix}"


def _random_pair(rng, shape=(6, 6)):
    y = (rng.random(shape) < 0.5).astype(float)
    p = rng.random(shape)
    return y, p


def test_gradient_verification_all_losses():
    start = time.monotonic()
    failures = []
    for seed in range(100):
        for result in run_gradcheck(seed=seed, size=(8, 8), tol=1e-5, abs_floor=1e-8):
            if not result.passed:
                failures.append((seed, result.loss, result.max_rel_error))
    elapsed = time.monotonic() - start
    _report(
        "gradient verification (15 losses, 100 seeds, rel 1e-5)",
        not failures and elapsed < 60.0,
        f"{elapsed:.1f} s, {len(failures)} failures",
    )


def test_reduction_identities():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        y, p = _random_pair(rng)
        phi0 = np.zeros_like(p)
        overlap = float(np.sum(y * p))
        fp = float(np.sum((1.0 - y) * p))
        fn = float(np.sum(y * (1.0 - p)))
        tversky_closed = 1.0 - (overlap + 1.0) / (overlap + 0.5 * (fp + fn) + 1.0)
        pairs = [
            (focal(y, p, CFG.replace(gamma=0.0, alpha=1.0)), bce(y, p)),
            (weighted_bce(y, p, CFG.replace(beta=1.0)), bce(y, p)),
            (tversky_loss(y, p, CFG.replace(beta=0.5)), tversky_closed),
            (
                exp_log_loss(y, p, CFG.replace(gamma=1.0, w_dice=0.0, w_cross=1.0, w_label=1.0)),
                bce(y, p),
            ),
            (distance_penalized_ce(y, p, phi0), bce(y, p)),
            (combo_loss(y, p, CFG.replace(alpha=0.0, beta=0.5)), dice_loss(y, p)),
            (
                focal_tversky_loss(y, p, CFG.replace(beta=0.3, gamma=1.0)),
                tversky_loss(y, p, CFG.replace(beta=0.3, gamma=1.0)),
            ),
        ]
        worst = max(worst, max(abs(a - b) for a, b in pairs))
    _report("reduction identities within 1e-12", worst < 1e-12, f"worst {worst:.2e}")


def test_log_cosh_chain_rule_and_bound():
    rng = np.random.default_rng(7)
    worst = 0.0
    bound_ok = True
    for _ in range(100):
        y, p = _random_pair(rng)
        lcd_grad = analytic_gradient("log_cosh_dice", y, p)
        factored = math.tanh(dice_loss(y, p)) * analytic_gradient("dice", y, p)
        worst = max(worst, float(np.max(np.abs(lcd_grad - factored))))
        bound_ok &= log_cosh_dice_loss(y, p) <= dice_loss(y, p)
    _report(
        "log-cosh chain rule (tanh factorization, 1e-12) and bound",
        worst < 1e-12 and bound_ok,
        f"worst {worst:.2e}",
    )


def test_geometry_oracles():
    rng = np.random.default_rng(11)
    dt_exact = True
    for _ in range(200):
        mask = (rng.random((16, 16)) < 0.2).astype(float)
        if mask.sum() == 0:
            mask[int(rng.integers(16)), int(rng.integers(16))] = 1.0
        sources = extract_boundary(mask)
        got = distance_transform((16, 16), sources)
        want = np.zeros((16, 16))
        for r in range(16):
            for c in range(16):
                want[r, c] = math.sqrt(
                    min((r - pr) ** 2 + (c - pc) ** 2 for pr, pc in sources.points)
                )
        dt_exact &= bool(np.array_equal(got, want))

    set_exact = True
    for _ in range(50):
        def random_set():
            count = int(rng.integers(1, 21))
            cells = rng.choice(15 * 15, size=count, replace=False)
            return PixelSet(
                shape=(15, 15), points=tuple((int(i) // 15, int(i) % 15) for i in cells)
            )

        a, b = random_set(), random_set()
        oracle_hd = max(
            max(min(math.dist(x, v) for v in b.points) for x in a.points),
            max(min(math.dist(x, v) for v in a.points) for x in b.points),
        )
        set_exact &= hausdorff_distance(a, b) == oracle_hd
        oracle_mean = 0.0
        for x in a.points:
            oracle_mean += min(math.dist(x, v) for v in b.points)
        oracle_mean /= len(a)
        set_exact &= mean_point_to_set_distance(a, b) == oracle_mean

    pythagoras = hausdorff_distance(
        PixelSet(shape=(5, 5), points=((0, 0),)), PixelSet(shape=(5, 5), points=((3, 4),))
    )
    _report(
        "geometry oracles (200x16x16 EDT exact, point sets, 3-4-5)",
        dt_exact and set_exact and pythagoras == 5.0,
    )


def test_metric_formulas():
    truth = np.array([[1.0, 1.0], [1.0, 0.0]])
    pred = np.array([[1.0, 1.0], [0.0, 1.0]])
    counts = hard_confusion(pred, truth)
    formula_ok = (
        counts.tp == 2
        and counts.fp == 1
        and counts.fn == 1
        and abs(dice_coefficient(pred, truth) - 2.0 / 3.0) < 1e-12
    )
    rng = np.random.default_rng(13)
    complement_ok = True
    cfg = LossConfig(smooth=1e-9)
    for _ in range(100):
        y = (rng.random((6, 6)) < 0.5).astype(float)
        q = (rng.random((6, 6)) < 0.5).astype(float)
        if y.sum() + q.sum() == 0:
            continue
        total = dice_loss(y, q, cfg) + dice_coefficient(binarize(q), y)
        complement_ok &= abs(total - 1.0) < 1e-9
    _report("metric formulas (hand counts, complementarity 1e-9)", formula_ok and complement_ok)


def test_convergence_suite():
    start = time.monotonic()
    truth = generate_mask(SyntheticMaskSpec(kind="disk", shape=(32, 32)))
    finals = {}
    for name in TABLE_LOSSES:
        trace = fit(truth, FitConfig(loss=name, steps=500))
        finals[name] = trace.final().dice
    elapsed = time.monotonic() - start
    laggards = {k: v for k, v in finals.items() if v < 0.99}
    _report(
        "convergence suite (10 losses, 32x32 disk, 500 steps, dice >= 0.99)",
        not laggards and elapsed < 120.0,
        f"{elapsed:.1f} s" + (f", laggards {laggards}" if laggards else ""),
    )


def test_imbalance_probe_region_losses():
    truth = generate_mask(SyntheticMaskSpec(kind="sparse", shape=(64, 64), fraction=0.01, seed=0))
    reached = {}
    for name in REGION_LOSSES:
        trace = fit(truth, FitConfig(loss=name, steps=1000, learning_rate=0.5, init="zeros"))
        best = max(row.dice for row in trace.rows)
        reached[name] = best
    laggards = {k: v for k, v in reached.items() if v < 0.95}
    _report(
        "imbalance probe: region losses reach dice >= 0.95 within 1000 steps",
        not laggards,
        f"best dice {min(reached.values()):.3f}" + (f", laggards {laggards}" if laggards else ""),
    )


@pytest.mark.xfail(
    strict=True,
    reason=(
        "unattainable as specified: from all-zero logits every pixel sits exactly at "
        "the 0.5 binarization threshold, so the first update of any loss with "
        "correctly-signed per-pixel gradients classifies every pixel; dice and bce "
        "both reach hard dice 1.0 at step 1 and the strict inequality cannot hold"
    ),
)
def test_imbalance_probe_dice_strictly_faster_than_bce():
    truth = generate_mask(SyntheticMaskSpec(kind="sparse", shape=(64, 64), fraction=0.01, seed=0))
    steps = {}
    for name in ("dice", "bce"):
        trace = fit(truth, FitConfig(loss=name, steps=1000, learning_rate=0.5, init="zeros"))
        steps[name] = trace.steps_to_reach(0.9)
    comparable = steps["dice"] is not None and steps["bce"] is not None
    strictly_faster = comparable and steps["dice"] < steps["bce"]
    _report(
        "imbalance probe: dice reaches 0.9 in strictly fewer steps than bce",
        strictly_faster,
        f"dice {steps['dice']}, bce {steps['bce']}",
    )


def test_cli_determinism(tmp_path, capsys):
    rng = np.random.default_rng(17)
    truth = (rng.random((8, 8)) < 0.5).astype(float)
    pred = rng.random((8, 8))
    truth_path = tmp_path / "t.pgm"
    pred_path = tmp_path / "p.csv"
    truth_path.write_text(serialize_mask(truth))
    pred_path.write_text(serialize_grid(pred))

    def run_twice(argv, out_dir=None):
        outputs = []
        for _ in range(2):
            code = main(argv)
            captured = capsys.readouterr()
            assert code == 0, captured.err
            files = {}
            if out_dir is not None:
                files = {f.name: f.read_bytes() for f in out_dir.iterdir()}
            outputs.append((captured.out, files))
        return outputs[0] == outputs[1]

    same = True
    base = ["--truth", str(truth_path), "--pred", str(pred_path)]
    same &= run_twice(["eval", *base, "--loss", "log_cosh_dice"])
    same &= run_twice(["eval", *base, "--loss", "ssl", "--digits", "17"])
    same &= run_twice(["gradcheck", "--size", "6x6", "--seed", "3"])
    same &= run_twice(["metrics", *base])
    out_dir = tmp_path / "report"
    same &= run_twice(
        [
            "fit", "--losses", "dice,bce", "--mask-spec", "sparse:fraction=0.05",
            "--size", "16x16", "--steps", "50", "--out", str(out_dir),
        ],
        out_dir,
    )
    _report("determinism: byte-identical CLI reruns (primary standalone)", same)
