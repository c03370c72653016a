"""ASCII file formats: P2 PGM masks and comma-separated float grids.

Both formats round-trip exactly: PGM through 0/255 levels, float grids
through 17-significant-digit decimal serialization.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .core import as_grid, as_mask

PGM_MAXVAL = 255


class FormatError(ValueError):
    """A file does not conform to its declared format."""


def _pgm_tokens(text: str):
    """Yield (token, line, col) with '#' comments stripped, 1-based positions."""
    for lineno, line in enumerate(text.split("\n"), start=1):
        body = line.split("#", 1)[0]
        col = 1
        for raw in body.split(" "):
            for token in raw.split("\t"):
                if token:
                    yield token, lineno, col
                col += len(token) + 1


def parse_mask(text: str) -> np.ndarray:
    """Parse an ASCII P2 PGM; values above 127 are foreground."""
    tokens = list(_pgm_tokens(text))
    if not tokens or tokens[0][0] != "P2":
        found = tokens[0][0] if tokens else "<empty>"
        raise FormatError(f"bad magic {found!r} at line 1: expected ASCII PGM 'P2'")
    header: list[int] = []
    values: list[int] = []
    expected = None
    for token, line, col in tokens[1:]:
        try:
            value = int(token)
        except ValueError:
            raise FormatError(
                f"non-numeric token {token!r} at line {line}, column {col}"
            ) from None
        if len(header) < 3:
            header.append(value)
            if len(header) == 3:
                width, height, maxval = header
                if width < 1 or height < 1:
                    raise FormatError(
                        f"bad dimensions {width}x{height} at line {line}, column {col}"
                    )
                if maxval != PGM_MAXVAL:
                    raise FormatError(
                        f"unsupported maxval {maxval} at line {line}, column {col}: "
                        f"expected {PGM_MAXVAL}"
                    )
                expected = width * height
        else:
            if value < 0 or value > header[2]:
                raise FormatError(
                    f"pixel value {value} out of range [0, {header[2]}] "
                    f"at line {line}, column {col}"
                )
            values.append(value)
    if expected is None:
        raise FormatError("truncated PGM header: expected width, height, maxval")
    if len(values) != expected:
        raise FormatError(
            f"dimension mismatch: header promises {expected} pixels, found {len(values)}"
        )
    width, height, _ = header
    grid = np.asarray(values, dtype=np.int64).reshape(height, width)
    return as_mask((grid > 127).astype(np.float64))


def serialize_mask(mask) -> str:
    mask = as_mask(mask)
    h, w = mask.shape
    lines = ["P2", f"{w} {h}", str(PGM_MAXVAL)]
    for row in mask:
        lines.append(" ".join("255" if v == 1.0 else "0" for v in row))
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> np.ndarray:
    """Parse a rectangular CSV of finite reals."""
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.strip() == "":
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(
                f"row length mismatch at line {lineno}: expected {width} values, "
                f"found {len(cells)}"
            )
        row = []
        for colno, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise FormatError(
                    f"non-numeric token {cell.strip()!r} at line {lineno}, column {colno}"
                ) from None
            if not np.isfinite(value):
                raise FormatError(
                    f"non-finite value {cell.strip()!r} at line {lineno}, column {colno}"
                )
            row.append(value)
        rows.append(row)
    if not rows:
        raise FormatError("empty grid file")
    return as_grid(rows)


def parse_prob_grid(text: str) -> np.ndarray:
    """Parse a CSV probability map, reporting the position of range violations."""
    grid = parse_grid(text)
    bad = np.argwhere((grid < 0.0) | (grid > 1.0))
    if bad.size:
        r, c = int(bad[0][0]), int(bad[0][1])
        raise FormatError(
            f"out-of-range probability {grid[r, c]!r} at line {r + 1}, column {c + 1}: "
            "must lie in [0, 1]"
        )
    return grid


def parse_nonneg_grid(text: str) -> np.ndarray:
    """Parse a CSV distance map, rejecting negative entries."""
    grid = parse_grid(text)
    bad = np.argwhere(grid < 0.0)
    if bad.size:
        r, c = int(bad[0][0]), int(bad[0][1])
        raise FormatError(
            f"negative distance {grid[r, c]!r} at line {r + 1}, column {c + 1}"
        )
    return grid


def serialize_grid(grid) -> str:
    """17-significant-digit CSV; parses back to bit-identical float64."""
    grid = as_grid(grid)
    return "\n".join(",".join(format(v, ".17g") for v in row) for row in grid) + "\n"


def load_probabilities(text: str) -> np.ndarray:
    """Accept either a P2 mask (values become 0/1 probabilities) or a CSV grid."""
    if text.lstrip().startswith("P2"):
        return parse_mask(text)
    return parse_prob_grid(text)


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file and rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".segloss-tmp-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
