"""QR symbol encoder: segments, padding, block ECC, interleaving, masking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrix
from .gf256 import rs_encode
from .tables import (
    ALPHANUMERIC_CHARS,
    BLOCKS,
    COUNT_BITS,
    MODE_ALPHANUMERIC,
    MODE_BYTE,
    MODE_NUMERIC,
    PAD_CODEWORDS,
    EccLevel,
    capacity,
    side_modules,
)


class CapacityError(ValueError):
    """Payload does not fit the selected symbol."""


@dataclass(frozen=True)
class QrMatrix:
    """An encoded symbol: bit grid plus the parameters that produced it."""

    version: int
    ecc: EccLevel
    mask_id: int
    bits: np.ndarray = field(repr=False)

    @property
    def side(self) -> int:
        return self.bits.shape[0]

    def __post_init__(self):
        side = side_modules(self.version)
        if self.bits.shape != (side, side):
            raise ValueError("bit grid does not match version side length")


class _BitBuffer:
    def __init__(self):
        self.bits: list[int] = []

    def put(self, value: int, length: int) -> None:
        for i in range(length - 1, -1, -1):
            self.bits.append((value >> i) & 1)

    def to_codewords(self) -> bytes:
        out = bytearray()
        for i in range(0, len(self.bits), 8):
            byte = 0
            for b in self.bits[i:i + 8]:
                byte = (byte << 1) | b
            out.append(byte)
        return bytes(out)


def _segment_bits(payload: bytes, mode: int) -> _BitBuffer:
    buf = _BitBuffer()
    buf.put(mode, 4)
    if mode == MODE_BYTE:
        buf.put(len(payload), COUNT_BITS[mode])
        for b in payload:
            buf.put(b, 8)
    elif mode == MODE_NUMERIC:
        text = payload.decode("ascii")
        buf.put(len(text), COUNT_BITS[mode])
        for i in range(0, len(text), 3):
            group = text[i:i + 3]
            buf.put(int(group), {1: 4, 2: 7, 3: 10}[len(group)])
    elif mode == MODE_ALPHANUMERIC:
        text = payload.decode("ascii")
        buf.put(len(text), COUNT_BITS[mode])
        for i in range(0, len(text), 2):
            pair = text[i:i + 2]
            if len(pair) == 2:
                buf.put(ALPHANUMERIC_CHARS.index(pair[0]) * 45
                        + ALPHANUMERIC_CHARS.index(pair[1]), 11)
            else:
                buf.put(ALPHANUMERIC_CHARS.index(pair[0]), 6)
    else:
        raise ValueError(f"unsupported mode {mode:#06b}")
    return buf


def make_codewords(payload: bytes, version: int, ecc: EccLevel, mode: int = MODE_BYTE) -> bytes:
    """Data codewords for one symbol: segment, terminator, pad bytes."""
    layout = BLOCKS[(version, ecc)]
    mode_name = {MODE_BYTE: "byte", MODE_NUMERIC: "numeric", MODE_ALPHANUMERIC: "alphanumeric"}[mode]
    cap = capacity(version, ecc, mode_name)
    if len(payload) > cap:
        raise CapacityError(
            f"payload of {len(payload)} exceeds {mode_name} capacity {cap} "
            f"for version {version}-{ecc.value}"
        )
    buf = _segment_bits(payload, mode)
    limit = 8 * layout.data_codewords
    buf.put(0, min(4, limit - len(buf.bits)))  # terminator
    if len(buf.bits) % 8:
        buf.put(0, 8 - len(buf.bits) % 8)
    data = bytearray(buf.to_codewords())
    i = 0
    while len(data) < layout.data_codewords:
        data.append(PAD_CODEWORDS[i % 2])
        i += 1
    return bytes(data)


def interleave(data: bytes, version: int, ecc: EccLevel) -> bytes:
    """Split into blocks, append per-block parity, interleave both."""
    layout = BLOCKS[(version, ecc)]
    sizes = layout.block_sizes()
    blocks: list[bytes] = []
    pos = 0
    for k in sizes:
        blocks.append(data[pos:pos + k])
        pos += k
    parities = [rs_encode(b, layout.ecc_per_block) for b in blocks]

    out = bytearray()
    for i in range(max(sizes)):
        for b in blocks:
            if i < len(b):
                out.append(b[i])
    for i in range(layout.ecc_per_block):
        for p in parities:
            out.append(p[i])
    return bytes(out)


def build_matrix(codewords: bytes, version: int, ecc: EccLevel,
                 mask_id: int | None = None) -> QrMatrix:
    """Place interleaved codewords on the grid and choose (or force) a mask."""
    side = side_modules(version)
    template, reserved = matrix.function_patterns(version)
    rows, cols = matrix.placement_order(version)

    bit_arr = np.unpackbits(np.frombuffer(codewords, dtype=np.uint8))
    data_bits = np.zeros(len(rows), dtype=np.uint8)
    data_bits[:len(bit_arr)] = bit_arr[:len(rows)]

    base = template.copy()
    base[rows, cols] = data_bits

    masks = matrix.mask_arrays(side)
    candidates = range(8) if mask_id is None else [mask_id]
    best_grid, best_id, best_penalty = None, -1, None
    for m in candidates:
        grid = base.copy()
        flip = masks[m] & ~reserved
        grid ^= flip
        matrix.stamp_format(grid, ecc, m)
        if version >= 7:
            matrix.stamp_version(grid, version)
        score = matrix.penalty_score_fast(grid)
        if best_penalty is None or score < best_penalty:
            best_grid, best_id, best_penalty = grid, m, score
    return QrMatrix(version=version, ecc=ecc, mask_id=best_id, bits=best_grid)


def encode(payload: bytes, version: int, ecc: EccLevel | str,
           mode: int = MODE_BYTE, mask_id: int | None = None) -> QrMatrix:
    """Encode a payload into a QR symbol of the given version and ECC level."""
    ecc = EccLevel.parse(ecc)
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    data = make_codewords(payload, version, ecc, mode)
    full = interleave(data, version, ecc)
    return build_matrix(full, version, ecc, mask_id)
