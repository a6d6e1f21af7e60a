"""QR symbol decoder: format recovery, unmasking, block correction, parsing."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrix
from .gf256 import RsCorrectionError, rs_correct
from .tables import (
    ALPHANUMERIC_CHARS,
    BLOCKS,
    COUNT_BITS,
    MODE_ALPHANUMERIC,
    MODE_BYTE,
    MODE_NUMERIC,
    EccLevel,
    decode_format,
    decode_version,
    version_from_side,
)


class DecodeError(Exception):
    """Symbol could not be decoded; `details` carries per-stage diagnostics."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


@dataclass
class DecodeResult:
    payload: bytes
    version: int
    ecc: EccLevel
    mask_id: int
    corrected_codewords: int = 0
    format_distance: int = 0
    block_errors: list[int] = field(default_factory=list)


def _read_format(grid: np.ndarray) -> tuple[EccLevel, int, int]:
    word_a, word_b = matrix.read_format_words(grid)
    errors = []
    best = None
    for word in (word_a, word_b):
        try:
            ecc, mask_id, dist = decode_format(word)
        except ValueError as exc:
            errors.append(str(exc))
            continue
        if best is None or dist < best[2]:
            best = (ecc, mask_id, dist)
    if best is None:
        raise DecodeError("both format copies unreadable", {"format_errors": errors})
    return best


def _deinterleave(stream: bytes, version: int, ecc: EccLevel) -> list[bytes]:
    layout = BLOCKS[(version, ecc)]
    sizes = layout.block_sizes()
    nblocks = len(sizes)
    blocks = [bytearray() for _ in range(nblocks)]
    pos = 0
    for i in range(max(sizes)):
        for b, size in enumerate(sizes):
            if i < size:
                blocks[b].append(stream[pos])
                pos += 1
    for _ in range(layout.ecc_per_block):
        for b in range(nblocks):
            blocks[b].append(stream[pos])
            pos += 1
    return [bytes(b) for b in blocks]


def _parse_segments(data: bytes, version: int) -> bytes:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)).tolist()
    pos = 0
    out = bytearray()

    def take(n: int) -> int:
        nonlocal pos
        if pos + n > len(bits):
            raise DecodeError("bit stream truncated inside a segment")
        val = 0
        for b in bits[pos:pos + n]:
            val = (val << 1) | b
        pos += n
        return val

    while pos + 4 <= len(bits):
        mode = take(4)
        if mode == 0:  # terminator
            break
        if mode == MODE_BYTE:
            count = take(COUNT_BITS[MODE_BYTE])
            for _ in range(count):
                out.append(take(8))
        elif mode == MODE_NUMERIC:
            count = take(COUNT_BITS[MODE_NUMERIC])
            while count >= 3:
                val = take(10)
                if val > 999:
                    raise DecodeError("numeric group out of range")
                out.extend(f"{val:03d}".encode())
                count -= 3
            if count == 2:
                val = take(7)
                if val > 99:
                    raise DecodeError("numeric group out of range")
                out.extend(f"{val:02d}".encode())
            elif count == 1:
                val = take(4)
                if val > 9:
                    raise DecodeError("numeric group out of range")
                out.extend(f"{val:d}".encode())
        elif mode == MODE_ALPHANUMERIC:
            count = take(COUNT_BITS[MODE_ALPHANUMERIC])
            while count >= 2:
                val = take(11)
                if val >= 45 * 45:
                    raise DecodeError("alphanumeric pair out of range")
                out.append(ord(ALPHANUMERIC_CHARS[val // 45]))
                out.append(ord(ALPHANUMERIC_CHARS[val % 45]))
                count -= 2
            if count == 1:
                val = take(6)
                if val >= 45:
                    raise DecodeError("alphanumeric char out of range")
                out.append(ord(ALPHANUMERIC_CHARS[val]))
        else:
            raise DecodeError(f"unsupported segment mode {mode:#06b}")
    return bytes(out)


def decode_details(grid: np.ndarray) -> DecodeResult:
    """Decode a sampled bit grid (1 = dark); raises DecodeError on failure."""
    grid = np.asarray(grid, dtype=np.uint8)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise DecodeError(f"grid shape {grid.shape} is not square")
    side = grid.shape[0]
    version = version_from_side(side)

    if version >= 7:
        word_a, word_b = matrix.read_version_words(grid)
        got = None
        for word in (word_a, word_b):
            try:
                v, _dist = decode_version(word)
            except ValueError:
                continue
            if v == version:
                got = v
                break
        if got is None:
            raise DecodeError("version information does not match symbol size",
                              {"side": side})

    ecc, mask_id, fmt_dist = _read_format(grid)

    _, reserved = matrix.function_patterns(version)
    unmasked = grid ^ (matrix.mask_arrays(side)[mask_id] & ~reserved)
    rows, cols = matrix.placement_order(version)
    bit_stream = unmasked[rows, cols]

    layout = BLOCKS[(version, ecc)]
    n_bits = 8 * layout.total_codewords
    stream = np.packbits(bit_stream[:n_bits]).tobytes()

    blocks = _deinterleave(stream, version, ecc)
    data = bytearray()
    corrected = 0
    block_errors: list[int] = []
    for i, (block, size) in enumerate(zip(blocks, layout.block_sizes())):
        try:
            fixed = rs_correct(block, layout.ecc_per_block)
        except RsCorrectionError as exc:
            raise DecodeError(
                f"block {i} uncorrectable: {exc}",
                {"block": i, "ecc_per_block": layout.ecc_per_block,
                 "blocks_ok": block_errors},
            ) from exc
        n_fixed = sum(a != b for a, b in zip(fixed, block))
        corrected += n_fixed
        block_errors.append(n_fixed)
        data.extend(fixed[:size])

    payload = _parse_segments(bytes(data), version)
    return DecodeResult(payload=payload, version=version, ecc=ecc, mask_id=mask_id,
                        corrected_codewords=corrected, format_distance=fmt_dist,
                        block_errors=block_errors)


def decode(grid) -> bytes:
    """Payload bytes of a QrMatrix or sampled bit grid."""
    bits = getattr(grid, "bits", grid)
    return decode_details(bits).payload
