"""Finder-pattern detection and perspective grid sampling on binary images.

The scan follows the classical recipe: 1:1:3:1:1 run windows on scanlines,
vertical cross-validation, clustering, then grouping finder triples by
orthogonality and spacing. Version comes from finder spacing; the fourth
homography point is the bottom-right alignment pattern (version 2 up) or a
parallelogram completion (version 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.ndimage import map_coordinates

from ..homography import apply_homography, solve_homography

RATIO = np.array([1.0, 1.0, 3.0, 1.0, 1.0])
RATIO_TOLERANCE = 0.4  # fraction of each run's expected width
MIN_MODULE_PX = 1.8
VALID_SIDES = tuple(range(21, 46, 4))


@dataclass
class FinderCandidate:
    x: float
    y: float
    module: float
    hits: int = 1


@dataclass
class DetectedCode:
    grid: np.ndarray
    center: tuple[float, float]
    corners: np.ndarray  # (4, 2): TL, TR, BR, BL in image coords
    version: int
    confidence: float

    @property
    def height_px(self) -> float:
        return float(np.linalg.norm(self.corners[3] - self.corners[0]))


def _runs(binary: np.ndarray):
    """Row-major run decomposition: start index, length, value, row, col."""
    h, w = binary.shape
    flat = binary.ravel()
    breaks = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    row_starts = np.arange(1, h, dtype=np.intp) * w
    starts = np.unique(np.concatenate([[0], breaks, row_starts]))
    lengths = np.diff(np.append(starts, h * w))
    return starts, lengths, flat[starts], starts // w, starts % w


def _ratio_ok(lengths: np.ndarray, module: np.ndarray) -> np.ndarray:
    ok = np.ones(lengths.shape[0], dtype=bool)
    for i, weight in enumerate(RATIO):
        expect = weight * module
        ok &= np.abs(lengths[:, i] - expect) <= RATIO_TOLERANCE * expect
    return ok


def _horizontal_candidates(binary: np.ndarray) -> list[FinderCandidate]:
    starts, lengths, values, rows, cols = _runs(binary)
    n = len(starts)
    if n < 5:
        return []
    win_len = np.lib.stride_tricks.sliding_window_view(lengths, 5)
    idx = np.arange(n - 4)
    same_row = rows[idx] == rows[idx + 4]
    dark_first = values[idx] == 1
    total = win_len.sum(axis=1)
    module = total / 7.0
    mask = same_row & dark_first & (module >= MIN_MODULE_PX)
    mask[mask] = _ratio_ok(win_len[mask], module[mask])
    out = []
    for i in np.flatnonzero(mask):
        cx = cols[i] + win_len[i, 0] + win_len[i, 1] + win_len[i, 2] / 2.0
        out.append(FinderCandidate(x=float(cx), y=float(rows[i]), module=float(module[i])))
    return out


def _cluster(cands: list[FinderCandidate]) -> list[FinderCandidate]:
    """Merge per-scanline hits that belong to one finder."""
    clusters: list[FinderCandidate] = []
    for c in sorted(cands, key=lambda c: (c.x, c.y)):
        for cl in clusters:
            if abs(c.x - cl.x) <= 2.0 * cl.module and abs(c.y - cl.y) <= 4.0 * cl.module:
                k = cl.hits
                cl.x = (cl.x * k + c.x) / (k + 1)
                cl.y = (cl.y * k + c.y) / (k + 1)
                cl.module = (cl.module * k + c.module) / (k + 1)
                cl.hits += 1
                break
        else:
            clusters.append(FinderCandidate(c.x, c.y, c.module))
    return clusters


def _cross_check(binary: np.ndarray, cand: FinderCandidate,
                 vertical: bool) -> tuple[float, float] | None:
    """Walk the 5-run profile through the candidate along one axis; returns
    (center_along_axis, module) or None."""
    if vertical:
        line = binary[:, int(round(cand.x))]
        pos = int(round(cand.y))
    else:
        line = binary[int(round(cand.y)), :]
        pos = int(round(cand.x))
    n = len(line)
    if not 0 <= pos < n or line[pos] != 1:
        return None
    lengths = [0] * 5
    # center dark run
    i = pos
    while i >= 0 and line[i] == 1:
        lengths[2] += 1
        i -= 1
    top_light = i
    while top_light >= 0 and line[top_light] == 0:
        lengths[1] += 1
        top_light -= 1
    top_dark = top_light
    while top_dark >= 0 and line[top_dark] == 1:
        lengths[0] += 1
        top_dark -= 1
    j = pos + 1
    while j < n and line[j] == 1:
        lengths[2] += 1
        j += 1
    bot_light = j
    while bot_light < n and line[bot_light] == 0:
        lengths[3] += 1
        bot_light += 1
    bot_dark = bot_light
    while bot_dark < n and line[bot_dark] == 1:
        lengths[4] += 1
        bot_dark += 1
    if min(lengths) == 0:
        return None
    arr = np.array(lengths, dtype=np.float64)
    module = arr.sum() / 7.0
    if module < MIN_MODULE_PX:
        return None
    if not _ratio_ok(arr[None, :], np.array([module]))[0]:
        return None
    center = (i + 1) + lengths[2] / 2.0  # start of center run + half of it
    return center, float(module)


def find_finder_patterns(binary: np.ndarray) -> list[FinderCandidate]:
    """Cross-validated finder centers with estimated module sizes."""
    clusters = _cluster(_horizontal_candidates(binary))
    confirmed = []
    for c in clusters:
        v = _cross_check(binary, c, vertical=True)
        if v is None:
            continue
        cy, module_v = v
        c2 = FinderCandidate(x=c.x, y=cy, module=c.module)
        h2 = _cross_check(binary, c2, vertical=False)
        if h2 is None:
            continue
        cx, module_h = h2
        confirmed.append(FinderCandidate(
            x=cx, y=cy, module=(module_h + module_v) / 2.0, hits=c.hits))
    return confirmed


def _snap_side(estimate: float) -> tuple[int, float]:
    side = int(round((estimate - 17.0) / 4.0)) * 4 + 17
    side = min(max(side, VALID_SIDES[0]), VALID_SIDES[-1])
    return side, abs(estimate - side)


@dataclass
class _Triple:
    tl: FinderCandidate
    tr: FinderCandidate
    bl: FinderCandidate
    side: int
    score: float
    module: float


def group_triples(cands: list[FinderCandidate]) -> list[_Triple]:
    triples = []
    for combo in combinations(range(len(cands)), 3):
        pts = [cands[i] for i in combo]
        mods = [p.module for p in pts]
        if max(mods) / min(mods) > 1.4:
            continue
        module = sum(mods) / 3.0
        for corner in range(3):
            a = pts[corner]
            b, c = (pts[i] for i in range(3) if i != corner)
            v1 = np.array([b.x - a.x, b.y - a.y])
            v2 = np.array([c.x - a.x, c.y - a.y])
            d1, d2 = np.linalg.norm(v1), np.linalg.norm(v2)
            if d1 == 0 or d2 == 0 or max(d1, d2) / min(d1, d2) > 1.25:
                continue
            cos = float(v1 @ v2) / (d1 * d2)
            if abs(cos) > 0.25:
                continue
            span = (d1 + d2) / 2.0 / module + 7.0
            side, snap_err = _snap_side(span)
            if snap_err > 2.0:
                continue
            if float(np.cross(v1, v2)) > 0:
                tr, bl = b, c
            else:
                tr, bl = c, b
            score = abs(cos) + abs(d1 - d2) / max(d1, d2) + snap_err / 4.0
            triples.append(_Triple(tl=a, tr=tr, bl=bl, side=side,
                                   score=score, module=module))
    return triples


_ALIGN_PATTERN = np.array(
    [
        [1, 1, 1, 1, 1],
        [1, 0, 0, 0, 1],
        [1, 0, 1, 0, 1],
        [1, 0, 0, 0, 1],
        [1, 1, 1, 1, 1],
    ],
    dtype=np.float64,
)


def _locate_alignment(field: np.ndarray, est_xy: np.ndarray,
                      module_px: float) -> np.ndarray | None:
    """Best alignment-pattern center near the affine estimate, by sampling
    5x5 module centers over a quarter-module offset grid; None if nothing
    convincing is found."""
    offs = np.arange(-2.5, 2.5 + 1e-9, 0.25) * module_px
    gy, gx = np.mgrid[0:5, 0:5]
    rel = (np.stack([gx.ravel(), gy.ravel()], axis=1) - 2.0) * module_px
    expected = _ALIGN_PATTERN.ravel()
    best, best_score = None, -1.0
    h, w = field.shape
    for dy in offs:
        for dx in offs:
            center = est_xy + [dx, dy]
            pts = center + rel
            if (pts < 1).any() or (pts[:, 0] >= w - 1).any() or (pts[:, 1] >= h - 1).any():
                continue
            samples = map_coordinates(field, [pts[:, 1], pts[:, 0]], order=1)
            score = float(np.mean(1.0 - np.abs(samples - expected)))
            if score > best_score:
                best_score, best = score, center
    if best is None or best_score < 0.8:
        return None
    return best


def _sample_grid(field: np.ndarray, hom: np.ndarray, side: int) -> tuple[np.ndarray, float]:
    ij = np.arange(side) + 0.5
    gx, gy = np.meshgrid(ij, ij)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    img_pts = apply_homography(hom, pts)
    # average the center with four quarter-module offsets for stability
    acc = np.zeros(side * side, dtype=np.float64)
    for off in ((0.0, 0.0), (0.2, 0.0), (-0.2, 0.0), (0.0, 0.2), (0.0, -0.2)):
        shifted = apply_homography(hom, pts + off)
        acc += map_coordinates(field, [shifted[:, 1], shifted[:, 0]], order=1,
                               mode="constant", cval=0.0)
    acc /= 5.0
    grid = (acc >= 0.5).astype(np.uint8).reshape(side, side)
    confidence = float(np.mean(np.abs(acc - 0.5)) * 2.0)
    return grid, confidence


def detect(binary: np.ndarray) -> list[DetectedCode]:
    """All decodable-looking symbols in a bilevel image (1 = dark)."""
    binary = np.asarray(binary)
    if binary.ndim != 2:
        raise ValueError("expected a 2-d binary image")
    if binary.max(initial=0) > 1:
        binary = (binary > 0).astype(np.uint8)

    finders = find_finder_patterns(binary)
    if len(finders) < 3:
        return []
    field = binary.astype(np.float64)

    triples = sorted(group_triples(finders), key=lambda t: t.score)
    used: set[int] = set()
    codes: list[DetectedCode] = []
    for t in triples:
        ids = (id(t.tl), id(t.tr), id(t.bl))
        if any(i in used for i in ids):
            continue
        side = t.side
        tl = np.array([t.tl.x, t.tl.y])
        tr = np.array([t.tr.x, t.tr.y])
        bl = np.array([t.bl.x, t.bl.y])
        ex = (tr - tl) / (side - 7.0)
        ey = (bl - tl) / (side - 7.0)

        module_pts = [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5)]
        img_pts = [tl, tr, bl]
        if side > 21:
            est = tl + ex * (side - 10.0) + ey * (side - 10.0)
            found = _locate_alignment(field, est, t.module)
            if found is not None:
                module_pts.append((side - 6.5, side - 6.5))
                img_pts.append(found)
            else:
                module_pts.append((side - 3.5, side - 3.5))
                img_pts.append(tl + ex * (side - 7.0) + ey * (side - 7.0))
        else:
            module_pts.append((side - 3.5, side - 3.5))
            img_pts.append(tr + bl - tl)

        try:
            hom = solve_homography(np.array(module_pts), np.array(img_pts))
        except np.linalg.LinAlgError:
            continue
        grid, confidence = _sample_grid(field, hom, side)
        center = apply_homography(hom, np.array([side / 2.0, side / 2.0]))
        corners = apply_homography(
            hom, np.array([[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])
        )
        codes.append(DetectedCode(
            grid=grid,
            center=(float(center[0]), float(center[1])),
            corners=corners,
            version=(side - 17) // 4,
            confidence=confidence,
        ))
        used.update(ids)
    return codes
