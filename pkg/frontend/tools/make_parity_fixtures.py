#!/usr/bin/env python3
"""Generate the binding parity corpus by driving the segloss CLI.

Each case stores the exact inputs (mask bits, prediction float strings, config
overrides) together with the value and gradient the CLI printed at 17
significant digits. The TypeScript tests replay the same inputs through the
binding surface and require bit-identical floats.

Run from anywhere: python3 frontend/tools/make_parity_fixtures.py
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import numpy as np

FIXTURE_PATH = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "parity_cases.json"

# (loss, shape, config overrides); four cases per loss, 60 total
CASES = [
    ("bce", (1, 1), {}),
    ("bce", (2, 3), {}),
    ("bce", (5, 4), {"epsilon": 0.001}),
    ("bce", (8, 8), {}),
    ("weighted_bce", (2, 2), {"beta": 1.0}),
    ("weighted_bce", (3, 4), {"beta": 2.5}),
    ("weighted_bce", (6, 5), {"beta": 0.5}),
    ("weighted_bce", (8, 8), {"beta": 3.0}),
    ("balanced_bce", (2, 2), {}),
    ("balanced_bce", (4, 4), {}),
    ("balanced_bce", (5, 7), {}),
    ("balanced_bce", (8, 8), {}),
    ("focal", (2, 2), {"gamma": 0.0, "alpha": 1.0}),
    ("focal", (4, 4), {"gamma": 2.0, "alpha": 0.25}),
    ("focal", (5, 5), {"gamma": 1.5, "alpha": 0.6, "alpha_balanced": True}),
    ("focal", (8, 8), {}),
    ("distance_penalized_ce", (3, 3), {}),
    ("distance_penalized_ce", (4, 4), {}),
    ("distance_penalized_ce", (6, 6), {"epsilon": 1e-6}),
    ("distance_penalized_ce", (8, 8), {}),
    ("dice", (1, 1), {}),
    ("dice", (3, 3), {"smooth": 0.5}),
    ("dice", (5, 5), {}),
    ("dice", (8, 8), {"smooth": 2.0}),
    ("tversky", (2, 2), {"beta": 0.5}),
    ("tversky", (4, 4), {"beta": 0.3}),
    ("tversky", (5, 6), {"beta": 0.7}),
    ("tversky", (8, 8), {"beta": 0.5, "smooth": 0.5}),
    ("focal_tversky", (3, 3), {"beta": 0.3, "gamma": 1.0}),
    ("focal_tversky", (4, 4), {"beta": 0.5, "gamma": 2.0}),
    ("focal_tversky", (6, 6), {"beta": 0.7, "gamma": 3.0}),
    ("focal_tversky", (8, 8), {"gamma": 1.5}),
    ("sens_spec", (2, 2), {"w": 1.0}),
    ("sens_spec", (4, 4), {"w": 0.5}),
    ("sens_spec", (5, 5), {"w": 0.0}),
    ("sens_spec", (8, 8), {"w": 0.3}),
    ("log_cosh_dice", (1, 1), {}),
    ("log_cosh_dice", (4, 4), {}),
    ("log_cosh_dice", (6, 6), {"smooth": 0.5}),
    ("log_cosh_dice", (8, 8), {}),
    ("hausdorff_dt", (3, 3), {"hd_alpha": 2.0}),
    ("hausdorff_dt", (4, 4), {"hd_alpha": 4.0}),
    ("hausdorff_dt", (6, 6), {}),
    ("hausdorff_dt", (8, 8), {"hd_alpha": 3.0}),
    ("shape_aware", (3, 3), {}),
    ("shape_aware", (4, 4), {"shape_aware_per_pixel": True}),
    ("shape_aware", (6, 6), {}),
    ("shape_aware", (8, 8), {}),
    ("combo", (2, 2), {"alpha": 0.5, "beta": 0.5}),
    ("combo", (4, 4), {"alpha": 0.0, "beta": 0.3}),
    ("combo", (6, 6), {"alpha": 1.0, "beta": 0.7}),
    ("combo", (8, 8), {"alpha": 0.25, "beta": 0.5}),
    ("exp_log", (2, 2), {"gamma": 1.0, "w_dice": 0.0, "w_cross": 1.0}),
    ("exp_log", (4, 4), {"gamma": 2.0}),
    ("exp_log", (6, 6), {"gamma": 1.5, "w_dice": 0.8, "w_cross": 0.2}),
    ("exp_log", (8, 8), {}),
    ("ssl", (3, 3), {}),
    ("ssl", (4, 4), {"beta": 0.5}),
    ("ssl", (6, 6), {"c4": 0.05}),
    ("ssl", (8, 8), {"beta": 0.05, "window": 5}),
]


def f17(value: float) -> str:
    return format(value, ".17g")


def mask_to_pgm(bits, h, w):
    lines = ["P2", f"{w} {h}", "255"]
    for r in range(h):
        lines.append(" ".join("255" if bits[r * w + c] else "0" for c in range(w)))
    return "\n".join(lines) + "\n"


def run_cli(args):
    result = subprocess.run(
        [sys.executable, "-m", "segloss", *args],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        raise RuntimeError(f"segloss {args} failed: {result.stderr}")
    return result.stdout


def config_args(config):
    args = []
    for key, value in config.items():
        rendered = str(value).lower() if isinstance(value, bool) else f17(float(value))
        args.extend(["--config", f"{key}={rendered}"])
    return args


def build_case(index, loss, shape, config, rng):
    h, w = shape
    bits = (rng.random(h * w) < 0.5).astype(int)
    if bits.sum() == 0:
        bits[int(rng.integers(h * w))] = 1
    pred_strings = [f17(float(v)) for v in rng.random(h * w)]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        truth_path = tmp / "truth.pgm"
        pred_path = tmp / "pred.csv"
        grad_path = tmp / "grad.csv"
        truth_path.write_text(mask_to_pgm(bits, h, w))
        rows = [",".join(pred_strings[r * w : (r + 1) * w]) for r in range(h)]
        pred_path.write_text("\n".join(rows) + "\n")
        base = [
            "--truth", str(truth_path), "--pred", str(pred_path),
            "--loss", loss, "--digits", "17", *config_args(config),
        ]
        if loss == "distance_penalized_ce":
            base.append("--auto-phi")
        value_line = run_cli(["eval", *base]).strip()
        printed_name, expected_value = value_line.split("\t")
        assert printed_name == loss
        run_cli(["grad", *base, "--out", str(grad_path)])
        grad_cells = []
        for line in grad_path.read_text().strip().split("\n"):
            grad_cells.extend(line.split(","))
    return {
        "id": f"{loss}_{index}",
        "loss": loss,
        "h": h,
        "w": w,
        "truth": bits.tolist(),
        "pred": pred_strings,
        "config": config,
        "expected_value": expected_value,
        "expected_gradient": grad_cells,
    }


def main():
    rng = np.random.default_rng(20240808)
    cases = []
    for index, (loss, shape, config) in enumerate(CASES):
        cases.append(build_case(index, loss, shape, config, rng))
        print(f"[{index + 1:02d}/{len(CASES)}] {loss} {shape} ok")
    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE_PATH.write_text(json.dumps({"cases": cases}, indent=1) + "\n")
    print(f"wrote {len(cases)} cases to {FIXTURE_PATH}")


if __name__ == "__main__":
    main()
