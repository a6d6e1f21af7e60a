"""Physical-unit helpers: millimetres, printer dots, module grids."""
from __future__ import annotations

import math

MM_PER_INCH = 25.4
DEFAULT_DPI = 300

# module sizes quantize to the printer pitch at 300 dpi (~0.0847 mm);
# the coarser 0.085 mm grid is the conventional rounded step
MODULE_GRID_MM = 0.085

_EPS = 1e-9


def mm_to_px(mm: float, dpi: int = DEFAULT_DPI) -> int:
    return int(round(mm * dpi / MM_PER_INCH))


def px_to_mm(px: float, dpi: int = DEFAULT_DPI) -> float:
    return px * MM_PER_INCH / dpi


def dot_pitch_mm(dpi: int = DEFAULT_DPI) -> float:
    return MM_PER_INCH / dpi


def snap_up_to_dots(mm: float, dpi: int = DEFAULT_DPI) -> float:
    """Smallest whole-dot module size >= mm (never below one dot)."""
    dots = max(1, math.ceil(mm * dpi / MM_PER_INCH - _EPS))
    return dots * MM_PER_INCH / dpi


def snap_down_to_grid(mm: float, step: float = MODULE_GRID_MM) -> float:
    """Largest multiple of `step` <= mm."""
    return math.floor(mm / step + _EPS) * step


def floor_div(a: float, b: float) -> int:
    """floor(a / b) guarded against float noise at exact multiples."""
    if b <= 0:
        raise ValueError("divisor must be positive")
    return max(0, math.floor(a / b + _EPS))
