/**
 * Array <-> file-format marshalling for the segloss CLI.
 *
 * Masks travel as ASCII P2 PGM (0/255), float grids as CSV with 17
 * significant digits. Seventeen digits uniquely identify a float64, so a
 * value survives the round trip bit-identically on both sides.
 */

export function formatF64(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`cannot serialize non-finite value ${value}`);
  }
  return value.toPrecision(17);
}

function checkLength(values: ArrayLike<number>, h: number, w: number): void {
  if (!Number.isInteger(h) || !Number.isInteger(w) || h < 1 || w < 1) {
    throw new Error(`grid dimensions must be positive integers, got ${h}x${w}`);
  }
  if (values.length !== h * w) {
    throw new Error(`buffer length ${values.length} does not match ${h}x${w}`);
  }
}

export function maskToPgm(values: ArrayLike<number>, h: number, w: number): string {
  checkLength(values, h, w);
  const lines: string[] = ["P2", `${w} ${h}`, "255"];
  for (let r = 0; r < h; r++) {
    const row: string[] = [];
    for (let c = 0; c < w; c++) {
      const v = values[r * w + c];
      if (v !== 0 && v !== 1) {
        throw new Error(`mask values must be exactly 0 or 1, got ${v}`);
      }
      row.push(v === 1 ? "255" : "0");
    }
    lines.push(row.join(" "));
  }
  return lines.join("\n") + "\n";
}

export function gridToCsv(values: ArrayLike<number>, h: number, w: number): string {
  checkLength(values, h, w);
  const lines: string[] = [];
  for (let r = 0; r < h; r++) {
    const row: string[] = [];
    for (let c = 0; c < w; c++) {
      row.push(formatF64(values[r * w + c]));
    }
    lines.push(row.join(","));
  }
  return lines.join("\n") + "\n";
}

export function csvToArray(text: string): Float64Array {
  const rows = text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  const values: number[] = [];
  for (const row of rows) {
    for (const cell of row.split(",")) {
      const parsed = Number(cell);
      if (Number.isNaN(parsed) && cell.trim().toLowerCase() !== "nan") {
        throw new Error(`unparseable CSV cell ${JSON.stringify(cell)}`);
      }
      values.push(parsed);
    }
  }
  return Float64Array.from(values);
}
