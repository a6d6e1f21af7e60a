"""QR module-grid construction: function patterns, data placement, masking.

Grids are numpy uint8 arrays with 1 = dark. Function-pattern templates,
placement orders and mask arrays are cached per version; they depend only
on the symbol geometry.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .tables import ALIGNMENT_CENTERS, format_bits, side_modules, version_bits

_FINDER = np.array(
    [
        [1, 1, 1, 1, 1, 1, 1],
        [1, 0, 0, 0, 0, 0, 1],
        [1, 0, 1, 1, 1, 0, 1],
        [1, 0, 1, 1, 1, 0, 1],
        [1, 0, 1, 1, 1, 0, 1],
        [1, 0, 0, 0, 0, 0, 1],
        [1, 1, 1, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)

_ALIGNMENT = np.array(
    [
        [1, 1, 1, 1, 1],
        [1, 0, 0, 0, 1],
        [1, 0, 1, 0, 1],
        [1, 0, 0, 0, 1],
        [1, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)


@lru_cache(maxsize=None)
def function_patterns(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(template, reserved) for a version.

    template holds the fixed dark/light cells (format/version areas zeroed,
    they are stamped per symbol); reserved marks every non-data cell.
    """
    side = side_modules(version)
    tpl = np.zeros((side, side), dtype=np.uint8)
    res = np.zeros((side, side), dtype=bool)

    for r0, c0 in ((0, 0), (0, side - 7), (side - 7, 0)):
        tpl[r0:r0 + 7, c0:c0 + 7] = _FINDER
        rs, cs = max(r0 - 1, 0), max(c0 - 1, 0)
        res[rs:min(r0 + 8, side), cs:min(c0 + 8, side)] = True

    # timing
    for k in range(8, side - 8):
        bit = 1 - (k % 2)
        tpl[6, k] = bit
        tpl[k, 6] = bit
        res[6, k] = True
        res[k, 6] = True

    for cy in ALIGNMENT_CENTERS[version]:
        for cx in ALIGNMENT_CENTERS[version]:
            if res[cy, cx]:
                # overlaps a finder region; alignment not placed there
                if (cy <= 8 and cx <= 8) or (cy <= 8 and cx >= side - 9) or (cy >= side - 9 and cx <= 8):
                    continue
            tpl[cy - 2:cy + 3, cx - 2:cx + 3] = _ALIGNMENT
            res[cy - 2:cy + 3, cx - 2:cx + 3] = True

    # dark module
    tpl[side - 8, 8] = 1
    res[side - 8, 8] = True

    # format info areas (values stamped later)
    res[8, :9] = True
    res[:9, 8] = True
    res[8, side - 8:] = True
    res[side - 7:, 8] = True

    if version >= 7:
        res[side - 11:side - 8, :6] = True
        res[:6, side - 11:side - 8] = True

    tpl = tpl.copy()
    tpl[~res] = 0
    return tpl, res


@lru_cache(maxsize=None)
def placement_order(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) giving the zigzag order data bits occupy."""
    side = side_modules(version)
    _, reserved = function_patterns(version)
    rows, cols = [], []
    col = side - 1
    upward = True
    while col > 0:
        if col == 6:  # skip the vertical timing column entirely
            col -= 1
        rng = range(side - 1, -1, -1) if upward else range(side)
        for row in rng:
            for c in (col, col - 1):
                if not reserved[row, c]:
                    rows.append(row)
                    cols.append(c)
        upward = not upward
        col -= 2
    return np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp)


@lru_cache(maxsize=None)
def mask_arrays(side: int) -> np.ndarray:
    """All 8 mask patterns for a grid side, shape (8, side, side), 1 = flip."""
    r, c = np.mgrid[0:side, 0:side]
    masks = np.stack(
        [
            (r + c) % 2 == 0,
            r % 2 == 0,
            c % 3 == 0,
            (r + c) % 3 == 0,
            (r // 2 + c // 3) % 2 == 0,
            (r * c) % 2 + (r * c) % 3 == 0,
            ((r * c) % 2 + (r * c) % 3) % 2 == 0,
            ((r + c) % 2 + (r * c) % 3) % 2 == 0,
        ]
    )
    return masks.astype(np.uint8)


_FORMAT_POS_A = [  # copy around the top-left finder, bit 14 first
    (8, 0), (8, 1), (8, 2), (8, 3), (8, 4), (8, 5), (8, 7), (8, 8),
    (7, 8), (5, 8), (4, 8), (3, 8), (2, 8), (1, 8), (0, 8),
]


def _format_pos_b(side: int) -> list[tuple[int, int]]:
    # second copy: below the top-right finder and right of the bottom-left
    return [(side - 1 - k, 8) for k in range(7)] + [(8, side - 8 + k) for k in range(8)]


def stamp_format(grid: np.ndarray, ecc, mask_id: int) -> None:
    side = grid.shape[0]
    word = format_bits(ecc, mask_id)
    bits = [(word >> (14 - i)) & 1 for i in range(15)]
    for (r, c), b in zip(_FORMAT_POS_A, bits):
        grid[r, c] = b
    for (r, c), b in zip(_format_pos_b(side), bits):
        grid[r, c] = b


def read_format_words(grid: np.ndarray) -> tuple[int, int]:
    """The two 15-bit format words as stored (bit 14 first)."""
    side = grid.shape[0]
    a = 0
    for r, c in _FORMAT_POS_A:
        a = (a << 1) | int(grid[r, c] & 1)
    b = 0
    for r, c in _format_pos_b(side):
        b = (b << 1) | int(grid[r, c] & 1)
    return a, b


def stamp_version(grid: np.ndarray, version: int) -> None:
    side = grid.shape[0]
    word = version_bits(version)
    k = 0
    # bottom-left block: 6 columns x 3 rows; LSB at (side-9, 5) walking down-right
    for c in range(6):
        for r in range(3):
            bit = (word >> k) & 1
            grid[side - 11 + r, c] = bit
            grid[c, side - 11 + r] = bit
            k += 1


def read_version_words(grid: np.ndarray) -> tuple[int, int]:
    side = grid.shape[0]
    a = b = 0
    k = 0
    for c in range(6):
        for r in range(3):
            a |= int(grid[side - 11 + r, c] & 1) << k
            b |= int(grid[c, side - 11 + r] & 1) << k
            k += 1
    return a, b


def penalty_score(grid: np.ndarray) -> int:
    """Mask-evaluation penalty per the symbology's four rules."""
    side = grid.shape[0]
    g = grid.astype(np.int8)
    total = 0

    # rule 1: runs of >=5 equal modules, rows and columns
    for axis_grid in (g, g.T):
        for line in axis_grid:
            run = 1
            prev = line[0]
            for v in line[1:]:
                if v == prev:
                    run += 1
                else:
                    if run >= 5:
                        total += 3 + run - 5
                    run = 1
                    prev = v
            if run >= 5:
                total += 3 + run - 5

    # rule 2: 2x2 blocks of one color
    same = (g[:-1, :-1] == g[1:, :-1]) & (g[:-1, :-1] == g[:-1, 1:]) & (g[:-1, :-1] == g[1:, 1:])
    total += 3 * int(same.sum())

    # rule 3: finder-like 1:1:3:1:1 run with 4-module quiet flank
    pat = np.array([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=np.int8)
    for p in (pat, pat[::-1]):
        w = len(p)
        for axis_grid in (g, g.T):
            windows = np.lib.stride_tricks.sliding_window_view(axis_grid, w, axis=1)
            total += 40 * int((windows == p).all(axis=2).sum())

    # rule 4: dark-module proportion
    dark_pct = 100.0 * g.sum() / (side * side)
    total += 10 * int(abs(dark_pct - 50) // 5)
    return total


def penalty_score_fast(grid: np.ndarray) -> int:
    """Vectorized penalty identical to penalty_score (rule 1 without the
    per-line Python loop)."""
    side = grid.shape[0]
    g = grid.astype(np.int8)
    total = 0

    for axis_grid in (g, g.T):
        # run-length decomposition via change points on each padded row
        pad = np.full((axis_grid.shape[0], 1), -1, dtype=np.int8)
        arr = np.hstack([pad, axis_grid, pad])
        changes = arr[:, 1:] != arr[:, :-1]
        idx = np.flatnonzero(changes)
        # change positions along flattened rows; consecutive diffs are run lengths
        runs = np.diff(idx)
        row_of = idx // (arr.shape[1] - 1)
        same_row = row_of[1:] == row_of[:-1]
        runs = runs[same_row]
        long = runs[runs >= 5]
        total += int((3 + long - 5).sum())

    same = (g[:-1, :-1] == g[1:, :-1]) & (g[:-1, :-1] == g[:-1, 1:]) & (g[:-1, :-1] == g[1:, 1:])
    total += 3 * int(same.sum())

    pat = np.array([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=np.int8)
    for p in (pat, pat[::-1]):
        w = len(p)
        for axis_grid in (g, g.T):
            windows = np.lib.stride_tricks.sliding_window_view(axis_grid, w, axis=1)
            total += 40 * int((windows == p).all(axis=2).sum())

    dark_pct = 100.0 * g.sum() / (side * side)
    total += 10 * int(abs(dark_pct - 50) // 5)
    return total
