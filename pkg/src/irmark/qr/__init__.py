"""Self-contained QR codec: versions 1-7, ECC levels L/M/Q/H."""
from .decode import DecodeError, DecodeResult, decode, decode_details
from .encode import CapacityError, QrMatrix, encode
from .gf256 import RsCorrectionError, rs_correct, rs_encode
from .tables import MAX_VERSION, MIN_VERSION, EccLevel, capacity, side_modules, version_from_side

__all__ = [
    "CapacityError",
    "DecodeError",
    "DecodeResult",
    "EccLevel",
    "MAX_VERSION",
    "MIN_VERSION",
    "QrMatrix",
    "RsCorrectionError",
    "capacity",
    "decode",
    "decode_details",
    "encode",
    "rs_correct",
    "rs_encode",
    "side_modules",
    "version_from_side",
]
