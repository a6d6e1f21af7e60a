"""Symbol structure tables for QR versions 1-7, all four ECC levels.

Block layouts are embedded as data and validated at import time against
the codeword arithmetic (total codewords derived from module counts).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class EccLevel(Enum):
    L = "L"
    M = "M"
    Q = "Q"
    H = "H"

    @classmethod
    def parse(cls, value) -> "EccLevel":
        if isinstance(value, EccLevel):
            return value
        return cls(str(value).upper())


MIN_VERSION = 1
MAX_VERSION = 7


def side_modules(version: int) -> int:
    if not MIN_VERSION <= version <= MAX_VERSION:
        raise ValueError(f"version {version} outside supported range 1..{MAX_VERSION}")
    return 17 + 4 * version


def version_from_side(side: int) -> int:
    version, rem = divmod(side - 17, 4)
    if rem != 0 or not MIN_VERSION <= version <= MAX_VERSION:
        raise ValueError(f"grid side {side} is not a supported symbol size")
    return version


@dataclass(frozen=True)
class BlockLayout:
    """Per-(version, ecc) block structure: ecc codewords per block and
    (count, data_codewords) block groups."""

    ecc_per_block: int
    groups: tuple[tuple[int, int], ...]

    @property
    def data_codewords(self) -> int:
        return sum(n * k for n, k in self.groups)

    @property
    def block_count(self) -> int:
        return sum(n for n, _ in self.groups)

    @property
    def total_codewords(self) -> int:
        return self.data_codewords + self.block_count * self.ecc_per_block

    def block_sizes(self) -> list[int]:
        """Data codeword count per block, in interleaving order."""
        out = []
        for n, k in self.groups:
            out.extend([k] * n)
        return out


_L, _M, _Q, _H = EccLevel.L, EccLevel.M, EccLevel.Q, EccLevel.H

BLOCKS: dict[tuple[int, EccLevel], BlockLayout] = {
    (1, _L): BlockLayout(7, ((1, 19),)),
    (1, _M): BlockLayout(10, ((1, 16),)),
    (1, _Q): BlockLayout(13, ((1, 13),)),
    (1, _H): BlockLayout(17, ((1, 9),)),
    (2, _L): BlockLayout(10, ((1, 34),)),
    (2, _M): BlockLayout(16, ((1, 28),)),
    (2, _Q): BlockLayout(22, ((1, 22),)),
    (2, _H): BlockLayout(28, ((1, 16),)),
    (3, _L): BlockLayout(15, ((1, 55),)),
    (3, _M): BlockLayout(26, ((1, 44),)),
    (3, _Q): BlockLayout(18, ((2, 17),)),
    (3, _H): BlockLayout(22, ((2, 13),)),
    (4, _L): BlockLayout(20, ((1, 80),)),
    (4, _M): BlockLayout(18, ((2, 32),)),
    (4, _Q): BlockLayout(26, ((2, 24),)),
    (4, _H): BlockLayout(16, ((4, 9),)),
    (5, _L): BlockLayout(26, ((1, 108),)),
    (5, _M): BlockLayout(24, ((2, 43),)),
    (5, _Q): BlockLayout(18, ((2, 15), (2, 16))),
    (5, _H): BlockLayout(22, ((2, 11), (2, 12))),
    (6, _L): BlockLayout(18, ((2, 68),)),
    (6, _M): BlockLayout(16, ((4, 27),)),
    (6, _Q): BlockLayout(24, ((4, 19),)),
    (6, _H): BlockLayout(28, ((4, 15),)),
    (7, _L): BlockLayout(20, ((2, 78),)),
    (7, _M): BlockLayout(18, ((4, 31),)),
    (7, _Q): BlockLayout(18, ((2, 14), (4, 15))),
    (7, _H): BlockLayout(26, ((4, 13), (1, 14))),
}

ALIGNMENT_CENTERS: dict[int, tuple[int, ...]] = {
    1: (),
    2: (6, 18),
    3: (6, 22),
    4: (6, 26),
    5: (6, 30),
    6: (6, 34),
    7: (6, 22, 38),
}

# data modes: indicator bits and character-count field width (versions 1-9)
MODE_NUMERIC = 0b0001
MODE_ALPHANUMERIC = 0b0010
MODE_BYTE = 0b0100
COUNT_BITS = {MODE_NUMERIC: 10, MODE_ALPHANUMERIC: 9, MODE_BYTE: 8}

ALPHANUMERIC_CHARS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"

PAD_CODEWORDS = (0xEC, 0x11)


def total_codewords(version: int) -> int:
    """Codeword capacity derived from module counts (the independent check
    the embedded block table is validated against)."""
    side = side_modules(version)
    modules = side * side
    # finders with separators
    modules -= 3 * 64
    # timing, excluding overlap with finders/separators
    modules -= 2 * (side - 16)
    # alignment patterns not overlapping timing
    centers = ALIGNMENT_CENTERS[version]
    n_align = 0
    for cy in centers:
        for cx in centers:
            near_tl = cx <= 8 and cy <= 8
            near_tr = cx >= side - 9 and cy <= 8
            near_bl = cx <= 8 and cy >= side - 9
            if near_tl or near_tr or near_bl:
                continue
            n_align += 1
    modules -= n_align * 25
    if n_align:
        # alignments centered on the timing row/col eat 5 timing modules
        on_timing = sum(1 for c in centers if c == 6) * (len(centers) - 2) * 2
        modules += on_timing * 5
    # format info (two copies, 15 each) + dark module
    modules -= 31
    if version >= 7:
        modules -= 36
    return modules // 8


def _validate_blocks() -> None:
    for (version, _ecc), layout in BLOCKS.items():
        expect = total_codewords(version)
        if layout.total_codewords != expect:
            raise AssertionError(
                f"block table v{version}: {layout.total_codewords} codewords, "
                f"module arithmetic gives {expect}"
            )


def capacity(version: int, ecc: EccLevel, mode: str = "byte") -> int:
    """Character capacity of one symbol for the given data mode."""
    ecc = EccLevel.parse(ecc)
    layout = BLOCKS[(version, ecc)]
    bits = 8 * layout.data_codewords
    if mode == "byte":
        avail = bits - 4 - COUNT_BITS[MODE_BYTE]
        return max(0, avail // 8)
    if mode == "numeric":
        avail = bits - 4 - COUNT_BITS[MODE_NUMERIC]
        chars = (avail // 10) * 3
        rem = avail % 10
        if rem >= 7:
            chars += 2
        elif rem >= 4:
            chars += 1
        return max(0, chars)
    if mode == "alphanumeric":
        avail = bits - 4 - COUNT_BITS[MODE_ALPHANUMERIC]
        chars = (avail // 11) * 2
        if avail % 11 >= 6:
            chars += 1
        return max(0, chars)
    raise ValueError(f"unknown mode {mode!r}")


# -- format / version information ------------------------------------------

_ECC_INDICATOR = {_L: 0b01, _M: 0b00, _Q: 0b11, _H: 0b10}
_FORMAT_MASK = 0x5412
_FORMAT_GEN = 0b10100110111
_VERSION_GEN = 0b1111100100101


def _bch_remainder(value: int, gen: int, total_bits: int, data_bits: int) -> int:
    rem = value << (total_bits - data_bits)
    gen_deg = gen.bit_length() - 1
    for shift in range(total_bits - gen_deg - 1, -1, -1):
        if rem & (1 << (shift + gen_deg)):
            rem ^= gen << shift
    return rem


def format_bits(ecc: EccLevel, mask_id: int) -> int:
    """15-bit format word: 2 ecc bits, 3 mask bits, 10 BCH bits, masked."""
    data = (_ECC_INDICATOR[ecc] << 3) | mask_id
    word = (data << 10) | _bch_remainder(data, _FORMAT_GEN, 15, 5)
    return word ^ _FORMAT_MASK

def version_bits(version: int) -> int:
    """18-bit version word for symbols of version 7 and above."""
    return (version << 12) | _bch_remainder(version, _VERSION_GEN, 18, 6)


ALL_FORMAT_WORDS = {
    format_bits(e, m): (e, m) for e in EccLevel for m in range(8)
}
ALL_VERSION_WORDS = {version_bits(v): v for v in range(7, 41)}


def decode_format(word: int) -> tuple[EccLevel, int, int]:
    """Closest valid format word within Hamming distance 3.

    Returns (ecc, mask_id, distance); raises ValueError otherwise.
    """
    best, best_dist = None, 16
    for valid, info in ALL_FORMAT_WORDS.items():
        dist = bin(word ^ valid).count("1")
        if dist < best_dist:
            best, best_dist = info, dist
    if best is None or best_dist > 3:
        raise ValueError("format information unreadable")
    return best[0], best[1], best_dist


def decode_version(word: int) -> tuple[int, int]:
    """Closest valid version word within Hamming distance 3."""
    best, best_dist = None, 19
    for valid, v in ALL_VERSION_WORDS.items():
        dist = bin(word ^ valid).count("1")
        if dist < best_dist:
            best, best_dist = v, dist
    if best is None or best_dist > 3:
        raise ValueError("version information unreadable")
    return best, best_dist


_validate_blocks()
