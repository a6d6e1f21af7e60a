"""Payload handling: splitting data across symbols, reassembling decoded
fragments by sheet position, and online-mode content descriptors.

Fragments carry no sequence headers; order is recovered from symbol
coordinates (rows by center y, then x), mirroring how the reader walks a
sheet. Online payloads use the versioned scheme `ip1:<bundle>/<region>` so
plain offline text passes through untouched.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve

from .planner import CapacityPlan

ONLINE_SCHEME = "ip1"
TRACKABILITY_THRESHOLD = 75
FRAME_KINDS = ("text", "image", "audio")


class PayloadError(ValueError):
    pass


@dataclass(frozen=True)
class Chunk:
    grid_index: int
    data: bytes


@dataclass(frozen=True)
class ChunkSet:
    chunks: tuple[Chunk, ...]
    plan: CapacityPlan = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.chunks)

    def joined(self) -> bytes:
        return b"".join(c.data for c in sorted(self.chunks, key=lambda c: c.grid_index))


@dataclass(frozen=True)
class DecodedFragment:
    data: bytes
    center_xy: tuple[float, float]
    code_height_px: float


def chunk(payload: bytes, plan: CapacityPlan) -> ChunkSet:
    """Greedy row-major split of a payload over the plan's symbols."""
    if len(payload) > plan.total_chars:
        raise PayloadError(
            f"payload needs {len(payload)} bytes but the plan holds {plan.total_chars} "
            f"({plan.count} symbols x {plan.per_code_chars})"
        )
    per = plan.per_code_chars
    chunks = []
    for i in range(0, len(payload), per):
        chunks.append(Chunk(grid_index=len(chunks), data=payload[i:i + per]))
    return ChunkSet(chunks=tuple(chunks), plan=plan)


def assemble(fragments: list[DecodedFragment]) -> bytes:
    """Concatenate fragments in reading order (rows by center y, then x).

    Row membership uses a tolerance of half the median symbol height, which
    tolerates mild perspective without merging adjacent rows. Missing
    symbols simply shorten the result; the caller validates completeness.
    """
    if not fragments:
        raise PayloadError("no fragments to assemble")
    heights = sorted(f.code_height_px for f in fragments)
    tol = 0.5 * heights[len(heights) // 2]
    by_y = sorted(fragments, key=lambda f: f.center_xy[1])
    rows: list[list[DecodedFragment]] = []
    row_y = None
    for frag in by_y:
        y = frag.center_xy[1]
        if row_y is None or y - row_y > tol:
            rows.append([frag])
            row_y = y
        else:
            rows[-1].append(frag)
            row_y = sum(f.center_xy[1] for f in rows[-1]) / len(rows[-1])
    out = bytearray()
    for row in rows:
        for frag in sorted(row, key=lambda f: f.center_xy[0]):
            out.extend(frag.data)
    return bytes(out)


def trackability_score(image: np.ndarray, rect: tuple[int, int, int, int]) -> int:
    """Corner-feature density heuristic on 0..100.

    Deterministic and translation-invariant; blank regions score 0 and a
    dense checkerboard saturates well above the embeddability threshold.
    """
    image = np.asarray(image)
    if image.ndim == 3:
        image = image.mean(axis=2)
    x, y, w, h = rect
    if x < 0 or y < 0 or x + w > image.shape[1] or y + h > image.shape[0]:
        raise PayloadError("region exceeds image bounds")
    if w * h <= 4:
        return 0
    patch = image[y:y + h, x:x + w].astype(np.float64) / 255.0

    gy, gx = np.gradient(patch)
    ixx, iyy, ixy = gx * gx, gy * gy, gx * gy
    # 3x3 box sum of the structure tensor
    k = np.ones((3, 3)) / 9.0
    sxx = convolve(ixx, k, mode="nearest")
    syy = convolve(iyy, k, mode="nearest")
    sxy = convolve(ixy, k, mode="nearest")
    det = sxx * syy - sxy * sxy
    tr = sxx + syy
    harris = det - 0.05 * tr * tr

    corners = harris > 1e-3
    density = corners.sum() / corners.size
    # density 0.04 (a tight checkerboard) maps to full score
    return int(min(100.0, 100.0 * density / 0.04))


@dataclass(frozen=True)
class TrackedRegion:
    rect: tuple[int, int, int, int]
    score: int
    frames: tuple[dict, ...]  # {"kind": text|image|audio, "value": str}

    def __post_init__(self):
        if not self.frames:
            raise PayloadError("a tracked region needs at least one frame")
        for f in self.frames:
            if f.get("kind") not in FRAME_KINDS:
                raise PayloadError(f"unknown frame kind {f.get('kind')!r}")

    @property
    def embeddable(self) -> bool:
        return self.score >= TRACKABILITY_THRESHOLD


def region_payload(bundle_id: str, region_index: int) -> bytes:
    return f"{ONLINE_SCHEME}:{bundle_id}/{region_index}".encode("ascii")


_PAYLOAD_RE = re.compile(rf"^{ONLINE_SCHEME}:([A-Za-z0-9_-]+)/(\d+)$")


def parse_region_payload(data: bytes) -> tuple[str, int] | None:
    """(bundle_id, region_index) when `data` is an online payload, else None."""
    try:
        m = _PAYLOAD_RE.match(data.decode("ascii"))
    except UnicodeDecodeError:
        return None
    if not m:
        return None
    return m.group(1), int(m.group(2))


def build_online_descriptor(bundle_id: str, regions: list[TrackedRegion]) -> dict:
    """Content bundle for server-side storage plus per-region payloads.

    Every region must clear the trackability threshold; otherwise the
    offending regions are reported so the author can pick different areas.
    """
    if not bundle_id:
        raise PayloadError("bundle id must be non-empty")
    if not regions:
        raise PayloadError("online mode needs at least one tracked region")
    bad = [i for i, r in enumerate(regions) if not r.embeddable]
    if bad:
        scores = {i: regions[i].score for i in bad}
        raise PayloadError(
            f"regions {bad} score below {TRACKABILITY_THRESHOLD} "
            f"(scores {scores}); choose different areas"
        )
    return {
        "bundle": bundle_id,
        "regions": {
            str(i): {"rect": list(r.rect), "score": r.score,
                     "frames": [dict(f) for f in r.frames]}
            for i, r in enumerate(regions)
        },
        "payloads": [region_payload(bundle_id, i).decode("ascii")
                     for i in range(len(regions))],
    }
