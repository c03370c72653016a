"""Command-line front end: loss evaluation, analytic gradients, gradient
checking, hard metrics, and the fit/report harness.

Exit codes: 0 success, 1 check failure, 2 usage or parse error, 3 shape
mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .boundary import boundary_distance_map
from .core import ConfigError, LossConfig, ShapeError
from .formats import (
    FormatError,
    load_probabilities,
    parse_mask,
    parse_nonneg_grid,
    serialize_grid,
    write_text_atomic,
)
from .gradcheck import (
    LOSS_IDS,
    analytic_gradient,
    loss_value,
    normalized_phi,
    run_gradcheck,
)
from .harness import MASK_KINDS, FitConfig, SyntheticMaskSpec, run_matrix
from .metrics import binarize, dice_coefficient, sensitivity, specificity

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SHAPE = 3

_BOOL_FIELDS = {"alpha_balanced", "shape_aware_per_pixel"}
_INT_FIELDS = {"window"}
_FLOAT_FIELDS = {
    "epsilon",
    "smooth",
    "beta",
    "alpha",
    "gamma",
    "w",
    "w_dice",
    "w_cross",
    "w_label",
    "c4",
    "hd_alpha",
}


def parse_config(pairs: list[str]) -> LossConfig:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"config override {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        key = key.strip()
        raw = raw.strip()
        if key in _BOOL_FIELDS:
            if raw.lower() in ("true", "1", "yes"):
                overrides[key] = True
            elif raw.lower() in ("false", "0", "no"):
                overrides[key] = False
            else:
                raise ConfigError(f"config {key} expects a boolean, got {raw!r}")
        elif key in _INT_FIELDS:
            try:
                overrides[key] = int(raw)
            except ValueError:
                raise ConfigError(f"config {key} expects an integer, got {raw!r}") from None
        elif key in _FLOAT_FIELDS:
            try:
                overrides[key] = float(raw)
            except ValueError:
                raise ConfigError(f"config {key} expects a number, got {raw!r}") from None
        else:
            valid = sorted(_BOOL_FIELDS | _INT_FIELDS | _FLOAT_FIELDS)
            raise ConfigError(f"unknown config key {key!r}; valid keys: {', '.join(valid)}")
    return LossConfig().replace(**overrides)


def _format_value(value: float, digits: int) -> str:
    return format(value, ".9f") if digits == 9 else format(value, ".17g")


def _read(path: str) -> str:
    try:
        with open(path, "r") as handle:
            return handle.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def _load_inputs(args):
    truth = parse_mask(_read(args.truth))
    pred = load_probabilities(_read(args.pred))
    cfg = parse_config(args.config)
    aux = None
    if args.loss == "distance_penalized_ce":
        if args.phi:
            aux = parse_nonneg_grid(_read(args.phi))
        elif args.auto_phi:
            aux = boundary_distance_map(truth) if args.phi_raw else normalized_phi(truth)
        else:
            raise ConfigError("distance_penalized_ce needs --phi FILE or --auto-phi")
    return truth, pred, cfg, aux


def cmd_eval(args) -> int:
    truth, pred, cfg, aux = _load_inputs(args)
    value = loss_value(args.loss, truth, pred, cfg, aux)
    print(f"{args.loss}\t{_format_value(value, args.digits)}")
    return EXIT_OK


def cmd_grad(args) -> int:
    truth, pred, cfg, aux = _load_inputs(args)
    value = loss_value(args.loss, truth, pred, cfg, aux)
    grad = analytic_gradient(args.loss, truth, pred, cfg, aux)
    write_text_atomic(args.out, serialize_grid(grad))
    print(f"{args.loss}\t{_format_value(value, args.digits)}")
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    names = list(LOSS_IDS) if args.loss == "all" else [args.loss]
    try:
        h, w = _parse_size(args.size)
        results = run_gradcheck(names, seed=args.seed, size=(h, w), tol=args.tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    all_passed = True
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.loss}\t{result.max_rel_error:.3e}\t{status}")
        all_passed &= result.passed
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def cmd_metrics(args) -> int:
    truth = parse_mask(_read(args.truth))
    pred = load_probabilities(_read(args.pred))
    hard = binarize(pred, args.threshold)
    print(f"dice_coefficient\t{dice_coefficient(hard, truth):.9f}")
    print(f"sensitivity\t{sensitivity(hard, truth):.9f}")
    print(f"specificity\t{specificity(hard, truth):.9f}")
    return EXIT_OK


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"size must look like HxW, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"size must look like HxW, got {text!r}") from None


def parse_mask_spec(text: str, shape: tuple[int, int], seed: int) -> SyntheticMaskSpec:
    """Parse 'kind' or 'kind:key=value,...' into a synthetic mask spec."""
    kind, _, params_text = text.partition(":")
    if kind not in MASK_KINDS:
        raise ConfigError(f"unknown mask kind {kind!r}; valid kinds: {', '.join(MASK_KINDS)}")
    params = {}
    if params_text:
        for pair in params_text.split(","):
            if "=" not in pair:
                raise ConfigError(f"mask-spec parameter {pair!r} is not key=value")
            key, raw = pair.split("=", 1)
            if key not in ("radius_frac", "height_frac", "width_frac", "fraction"):
                raise ConfigError(f"unknown mask-spec parameter {key!r}")
            try:
                params[key] = float(raw)
            except ValueError:
                raise ConfigError(f"mask-spec parameter {key} expects a number") from None
    return SyntheticMaskSpec(kind=kind, shape=shape, seed=seed, **params)


def _trace_csv(trace) -> str:
    lines = ["step,loss,dice,sensitivity,specificity"]
    for row in trace.rows:
        lines.append(
            f"{row.step},{row.loss:.9g},{row.dice:.9g},"
            f"{row.sensitivity:.9g},{row.specificity:.9g}"
        )
    return "\n".join(lines) + "\n"


def _summary_csv(report) -> str:
    lines = ["loss_function,dice_coefficient,sensitivity,specificity"]
    for row in report.rows:
        lines.append(f"{row.loss},{row.dice:.9g},{row.sensitivity:.9g},{row.specificity:.9g}")
    return "\n".join(lines) + "\n"


def _summary_md(report) -> str:
    lines = [
        "| loss_function | dice_coefficient | sensitivity | specificity |",
        "| --- | --- | --- | --- |",
    ]
    for row in report.rows:
        lines.append(
            f"| {row.loss} | {row.dice:.9g} | {row.sensitivity:.9g} | {row.specificity:.9g} |"
        )
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    losses = [name.strip() for name in args.losses.split(",") if name.strip()]
    if not losses:
        raise ConfigError("--losses must name at least one loss")
    for name in losses:
        if name not in LOSS_IDS:
            raise ConfigError(f"unknown loss {name!r}; valid names: {', '.join(LOSS_IDS)}")
    shape = _parse_size(args.size)
    spec = parse_mask_spec(args.mask_spec, shape, args.mask_seed)
    loss_cfg = parse_config(args.config)
    fit_cfg = FitConfig(
        loss=losses[0],
        steps=args.steps,
        learning_rate=args.lr,
        seed=args.seed,
        init=args.init,
        record_every=args.record_every,
    )
    report, traces = run_matrix(losses, [spec], fit_cfg, loss_cfg)
    try:
        os.makedirs(args.out, exist_ok=True)
        for trace, row in zip(traces, report.rows):
            trace_path = os.path.join(args.out, f"trace_{row.loss}_{row.mask}.csv")
            write_text_atomic(trace_path, _trace_csv(trace))
        if args.format == "csv":
            summary_path = os.path.join(args.out, "summary.csv")
            write_text_atomic(summary_path, _summary_csv(report))
        else:
            summary_path = os.path.join(args.out, "summary.md")
            write_text_atomic(summary_path, _summary_md(report))
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for row in report.rows:
        flag = "\tDIVERGED" if row.diverged else ""
        print(f"{row.loss}\t{row.mask}\t{row.dice:.9g}{flag}")
    print(f"wrote {summary_path}")
    return EXIT_OK


def _add_eval_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--truth", required=True, help="ground-truth mask (ASCII P2 PGM)")
    sub.add_argument("--pred", required=True, help="prediction (CSV grid or P2 PGM)")
    sub.add_argument("--loss", required=True, choices=LOSS_IDS)
    sub.add_argument(
        "--config",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="loss configuration override, repeatable",
    )
    sub.add_argument("--phi", help="distance map CSV for distance_penalized_ce")
    sub.add_argument(
        "--auto-phi",
        action="store_true",
        help="derive phi from the truth boundary, scaled into [0, 1]",
    )
    sub.add_argument(
        "--phi-raw",
        action="store_true",
        help="with --auto-phi, keep raw pixel distances instead of scaling",
    )
    sub.add_argument("--digits", type=int, choices=(9, 17), default=9)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segloss",
        description="Binary segmentation loss toolkit",
    )
    parser.add_argument("--version", action="version", version=f"segloss {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    eval_cmd = commands.add_parser("eval", help="evaluate one loss on files")
    _add_eval_arguments(eval_cmd)
    eval_cmd.set_defaults(func=cmd_eval)

    grad_cmd = commands.add_parser("grad", help="write the analytic gradient as CSV")
    _add_eval_arguments(grad_cmd)
    grad_cmd.add_argument("--out", required=True, help="output CSV path")
    grad_cmd.set_defaults(func=cmd_grad)

    check_cmd = commands.add_parser("gradcheck", help="finite-difference verification")
    check_cmd.add_argument("--loss", default="all", choices=("all",) + LOSS_IDS)
    check_cmd.add_argument("--size", default="8x8")
    check_cmd.add_argument("--seed", type=int, default=42)
    check_cmd.add_argument("--tol", type=float, default=1e-5)
    check_cmd.set_defaults(func=cmd_gradcheck)

    metrics_cmd = commands.add_parser("metrics", help="hard Dice/sensitivity/specificity")
    metrics_cmd.add_argument("--truth", required=True)
    metrics_cmd.add_argument("--pred", required=True)
    metrics_cmd.add_argument("--threshold", type=float, default=0.5)
    metrics_cmd.set_defaults(func=cmd_metrics)

    for name, help_text in (
        ("fit", "gradient-descent fits against a synthetic mask"),
        ("report", "same as fit: traces plus a summary table"),
    ):
        fit_cmd = commands.add_parser(name, help=help_text)
        fit_cmd.add_argument("--losses", required=True, help="comma-separated loss names")
        fit_cmd.add_argument("--mask-spec", default="disk", help="kind[:key=value,...]")
        fit_cmd.add_argument("--size", default="32x32")
        fit_cmd.add_argument("--mask-seed", type=int, default=0)
        fit_cmd.add_argument("--steps", type=int, default=500)
        fit_cmd.add_argument("--lr", type=float, default=0.5)
        fit_cmd.add_argument("--seed", type=int, default=0)
        fit_cmd.add_argument("--init", default="zeros", choices=("zeros", "random_uniform"))
        fit_cmd.add_argument("--record-every", type=int, default=1)
        fit_cmd.add_argument("--out", required=True, help="output directory")
        fit_cmd.add_argument("--format", default="csv", choices=("csv", "md"))
        fit_cmd.add_argument(
            "--config", action="append", default=[], metavar="KEY=VALUE"
        )
        fit_cmd.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
