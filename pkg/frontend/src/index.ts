/**
 * Thin array-in/array-out surface over the segloss command line.
 *
 * Every call copies its inputs into a scratch directory using the CLI's
 * documented file formats, runs one subcommand, and parses the full-precision
 * result back; nothing is shared or cached across calls, so the functions are
 * reentrant. Values and gradients are bit-identical to the Python library
 * because both directions serialize float64 at 17 significant digits.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { csvToArray, formatF64, gridToCsv, maskToPgm } from "./marshal";

export const LOSS_NAMES = [
  "bce",
  "weighted_bce",
  "balanced_bce",
  "focal",
  "distance_penalized_ce",
  "dice",
  "tversky",
  "focal_tversky",
  "sens_spec",
  "log_cosh_dice",
  "hausdorff_dt",
  "shape_aware",
  "combo",
  "exp_log",
  "ssl",
] as const;

export type LossName = (typeof LOSS_NAMES)[number];

export type LossConfig = Record<string, number | boolean>;

export interface MetricsResult {
  diceCoefficient: number;
  sensitivity: number;
  specificity: number;
}

function pythonExecutable(): string {
  return process.env.SEGLOSS_PYTHON ?? "python3";
}

function runCli(args: string[]): string {
  const result = spawnSync(pythonExecutable(), ["-m", "segloss", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) {
    throw new Error(`failed to launch segloss: ${result.error.message}`);
  }
  if (result.status !== 0) {
    const message = (result.stderr ?? "").trim();
    throw new Error(message || `segloss exited with status ${result.status}`);
  }
  return result.stdout;
}

function configArgs(config: LossConfig | undefined): string[] {
  const args: string[] = [];
  for (const [key, value] of Object.entries(config ?? {})) {
    let rendered: string;
    if (typeof value === "boolean") {
      rendered = String(value);
    } else if (Number.isInteger(value)) {
      rendered = String(value); // integer-typed keys reject decimal forms
    } else {
      rendered = formatF64(value);
    }
    args.push("--config", `${key}=${rendered}`);
  }
  return args;
}

function withScratchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "segloss-bindings-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function writeInputs(
  dir: string,
  truth: ArrayLike<number>,
  pred: ArrayLike<number>,
  h: number,
  w: number
): { truthPath: string; predPath: string } {
  const truthPath = join(dir, "truth.pgm");
  const predPath = join(dir, "pred.csv");
  writeFileSync(truthPath, maskToPgm(truth, h, w));
  writeFileSync(predPath, gridToCsv(pred, h, w));
  return { truthPath, predPath };
}

function evalArgs(
  name: string,
  truthPath: string,
  predPath: string,
  config: LossConfig | undefined
): string[] {
  const args = [
    "--truth",
    truthPath,
    "--pred",
    predPath,
    "--loss",
    name,
    "--digits",
    "17",
    ...configArgs(config),
  ];
  if (name === "distance_penalized_ce") {
    // the flat call surface carries no distance-map buffer; the penalty map
    // is derived from the truth boundary on the Python side
    args.push("--auto-phi");
  }
  return args;
}

function parseValueLine(stdout: string, name: string): number {
  const line = stdout.trim().split("\n").pop() ?? "";
  const [printed, value] = line.split("\t");
  if (printed !== name || value === undefined) {
    throw new Error(`unexpected segloss output: ${JSON.stringify(stdout)}`);
  }
  return Number(value);
}

/** Loss value for a truth mask and prediction, both row-major h*w buffers. */
export function loss(
  name: LossName,
  truth: ArrayLike<number>,
  pred: ArrayLike<number>,
  h: number,
  w: number,
  config?: LossConfig
): number {
  return withScratchDir((dir) => {
    const { truthPath, predPath } = writeInputs(dir, truth, pred, h, w);
    const stdout = runCli(["eval", ...evalArgs(name, truthPath, predPath, config)]);
    return parseValueLine(stdout, name);
  });
}

/** Row-major d(loss)/d(prediction) buffer for the same inputs as loss(). */
export function gradient(
  name: LossName,
  truth: ArrayLike<number>,
  pred: ArrayLike<number>,
  h: number,
  w: number,
  config?: LossConfig
): Float64Array {
  return withScratchDir((dir) => {
    const { truthPath, predPath } = writeInputs(dir, truth, pred, h, w);
    const outPath = join(dir, "grad.csv");
    runCli([
      "grad",
      ...evalArgs(name, truthPath, predPath, config),
      "--out",
      outPath,
    ]);
    const grad = csvToArray(readFileSync(outPath, "utf8"));
    if (grad.length !== h * w) {
      throw new Error(`gradient length ${grad.length} does not match ${h}x${w}`);
    }
    return grad;
  });
}

/** Hard Dice / sensitivity / specificity of a prediction against a mask. */
export function metrics(
  truth: ArrayLike<number>,
  pred: ArrayLike<number>,
  h: number,
  w: number,
  threshold = 0.5
): MetricsResult {
  return withScratchDir((dir) => {
    const { truthPath, predPath } = writeInputs(dir, truth, pred, h, w);
    const stdout = runCli([
      "metrics",
      "--truth",
      truthPath,
      "--pred",
      predPath,
      "--threshold",
      String(threshold),
    ]);
    const table = new Map<string, number>();
    for (const line of stdout.trim().split("\n")) {
      const [key, value] = line.split("\t");
      table.set(key, Number(value));
    }
    const pick = (key: string): number => {
      const value = table.get(key);
      if (value === undefined) {
        throw new Error(`metrics output missing ${key}: ${JSON.stringify(stdout)}`);
      }
      return value;
    };
    return {
      diceCoefficient: pick("dice_coefficient"),
      sensitivity: pick("sensitivity"),
      specificity: pick("specificity"),
    };
  });
}

/** Version string of the underlying Python toolkit. */
export function version(): string {
  return runCli(["--version"]).trim();
}
