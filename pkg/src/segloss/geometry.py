"""Pixel-set geometry: boundaries, exact Euclidean distance transform,
Hausdorff and point-to-curve distances, local window statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import as_grid, as_mask, validate_shape


@dataclass(frozen=True)
class PixelSet:
    """Unique in-bounds (row, col) coordinates within a grid of given shape."""

    shape: tuple[int, int]
    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        h, w = validate_shape(*self.shape)
        seen = set()
        for r, c in self.points:
            if not (0 <= r < h and 0 <= c < w):
                raise ValueError(f"pixel ({r}, {c}) out of bounds for {h}x{w}")
            if (r, c) in seen:
                raise ValueError(f"duplicate pixel ({r}, {c})")
            seen.add((r, c))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LocalStats:
    """Per-pixel window mean and population standard deviation."""

    mean: np.ndarray = field(repr=False)
    std: np.ndarray = field(repr=False)


def extract_boundary(mask) -> PixelSet:
    """Foreground pixels with at least one background 4-neighbor.

    The image border counts as background, so a solid block's outer ring is
    always boundary. An empty mask yields an empty set.
    """
    mask = as_mask(mask)
    fg = mask == 1.0
    padded = np.pad(fg, 1, mode="constant", constant_values=False)
    has_bg_neighbor = (
        ~padded[:-2, 1:-1]
        | ~padded[2:, 1:-1]
        | ~padded[1:-1, :-2]
        | ~padded[1:-1, 2:]
    )
    boundary = fg & has_bg_neighbor
    points = tuple((int(r), int(c)) for r, c in np.argwhere(boundary))
    return PixelSet(shape=mask.shape, points=points)


def _column_row_distances(h: int, w: int, source_grid: np.ndarray) -> np.ndarray:
    """Per column, |row offset| to the nearest source row (h+w where none)."""
    inf = h + w
    d = np.full((h, w), inf, dtype=np.int64)
    row = np.full(w, inf, dtype=np.int64)
    for r in range(h):
        row = np.minimum(row + 1, np.where(source_grid[r], 0, inf))
        d[r] = row
    row = np.full(w, inf, dtype=np.int64)
    for r in range(h - 1, -1, -1):
        row = np.minimum(row + 1, np.where(source_grid[r], 0, inf))
        d[r] = np.minimum(d[r], row)
    return d


def _lower_envelope_sq(f: list[int]) -> list[int]:
    """1D squared-distance transform: out[q] = min_p (q-p)^2 + f[p]."""
    n = len(f)
    v = [0] * n
    z = [0.0] * (n + 1)
    k = 0
    z[0] = -math.inf
    z[1] = math.inf
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = math.inf
    out = [0] * n
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        out[q] = (q - v[k]) * (q - v[k]) + f[v[k]]
    return out


def distance_transform_squared(shape: tuple[int, int], sources: PixelSet) -> np.ndarray:
    """Exact integer squared Euclidean distance to the nearest source pixel.

    Two passes: per-column 1D row distances, then a per-row lower envelope of
    parabolas over the squared column offsets.
    """
    h, w = validate_shape(*shape)
    if len(sources) == 0:
        raise ValueError("distance transform requires a nonempty source set")
    src = np.zeros((h, w), dtype=bool)
    for r, c in sources.points:
        src[r, c] = True
    d1 = _column_row_distances(h, w, src)
    f = d1 * d1
    out = np.empty((h, w), dtype=np.int64)
    for r in range(h):
        out[r] = _lower_envelope_sq(f[r].tolist())
    return out


def distance_transform(shape: tuple[int, int], sources: PixelSet) -> np.ndarray:
    """Exact Euclidean distance map; zero exactly on source pixels."""
    return np.sqrt(distance_transform_squared(shape, sources).astype(np.float64))


def _combined_shape(a: PixelSet, b: PixelSet) -> tuple[int, int]:
    return (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))


def directed_hausdorff(a: PixelSet, b: PixelSet) -> float:
    """max over a of the distance to the nearest point of b."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Hausdorff distance requires nonempty point sets")
    sq = distance_transform_squared(_combined_shape(a, b), b)
    worst = max(int(sq[r, c]) for r, c in a.points)
    return math.sqrt(worst)


def hausdorff_distance(a: PixelSet, b: PixelSet) -> float:
    """Symmetric Hausdorff distance: max of the two directed distances."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Hausdorff distance requires nonempty point sets")
    shape = _combined_shape(a, b)
    sq_b = distance_transform_squared(shape, b)
    sq_a = distance_transform_squared(shape, a)
    worst_ab = max(int(sq_b[r, c]) for r, c in a.points)
    worst_ba = max(int(sq_a[r, c]) for r, c in b.points)
    return math.sqrt(max(worst_ab, worst_ba))


def mean_point_to_set_distance(a: PixelSet, b: PixelSet) -> float:
    """Average over a of the distance to the nearest point of b."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("point-to-set distance requires nonempty point sets")
    sq = distance_transform_squared(_combined_shape(a, b), b)
    total = 0.0
    for r, c in a.points:
        total += math.sqrt(int(sq[r, c]))
    return total / len(a)


def local_stats(grid, window: int) -> LocalStats:
    """Window mean and population std per pixel, reflect-padded at borders."""
    grid = as_grid(grid)
    h, w = grid.shape
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd positive integer, got {window}")
    if window > min(h, w):
        raise ValueError(f"window {window} exceeds grid extent {min(h, w)}")
    pad = window // 2
    if pad == 0:
        return LocalStats(mean=grid.copy(), std=np.zeros_like(grid))
    padded = np.pad(grid, pad, mode="reflect")
    count = float(window * window)
    acc = np.zeros_like(grid)
    for dr in range(window):
        for dc in range(window):
            acc += padded[dr : dr + h, dc : dc + w]
    mean = acc / count
    acc2 = np.zeros_like(grid)
    for dr in range(window):
        for dc in range(window):
            diff = padded[dr : dr + h, dc : dc + w] - mean
            acc2 += diff * diff
    std = np.sqrt(acc2 / count)
    return LocalStats(mean=mean, std=std)
