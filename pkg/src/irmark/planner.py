"""Sheet layout planning: packing identical QR symbols with quiet zones and
finding the capacity-maximising version for a sheet.

The published detectability measurements (smallest decodable module size per
sheet format, ink density class and ECC level) are embedded as data; the
planner reproduces the published capacity figures from them to within a few
percent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .qr import EccLevel, capacity, side_modules
from .units import MODULE_GRID_MM, floor_div, snap_down_to_grid, snap_up_to_dots

DEFAULT_QUIET_MODULES = 4


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class SheetSpec:
    name: str
    width_mm: float
    height_mm: float

    def __post_init__(self):
        if self.width_mm <= 0 or self.height_mm <= 0:
            raise ValueError("sheet dimensions must be positive")

    @classmethod
    def preset(cls, name: str) -> "SheetSpec":
        key = name.strip().lower().replace("_", "-").replace(" ", "-")
        if key in ("letter", "us-letter"):
            return LETTER
        if key in ("half-letter", "halfletter", "us-half-letter"):
            return HALF_LETTER
        raise KeyError(f"unknown sheet preset {name!r}")


LETTER = SheetSpec("letter", 215.9, 279.4)
HALF_LETTER = SheetSpec("half-letter", 139.7, 215.9)


@dataclass(frozen=True)
class LayoutParams:
    version: int
    ecc: EccLevel
    module_mm: float
    quiet_modules: int = DEFAULT_QUIET_MODULES

    def __post_init__(self):
        if self.module_mm <= 0:
            raise ValueError("module size must be positive")
        if self.quiet_modules < 0:
            raise ValueError("quiet zone cannot be negative")

    @property
    def cell_modules(self) -> int:
        return side_modules(self.version) + 2 * self.quiet_modules

    @property
    def cell_mm(self) -> float:
        return self.cell_modules * self.module_mm

    @property
    def symbol_mm(self) -> float:
        return side_modules(self.version) * self.module_mm


@dataclass(frozen=True)
class Layout:
    """Placed symbols on a sheet; placement coordinates are the top-left
    corner of the symbol proper (quiet zone extends around it)."""

    sheet: SheetSpec
    params: LayoutParams
    cols: int
    rows: int
    placements: tuple[tuple[float, float], ...]

    @property
    def count(self) -> int:
        return len(self.placements)

    def validate(self) -> None:
        p = self.params
        quiet = p.quiet_modules * p.module_mm
        side = p.symbol_mm
        cells = []
        for x, y in self.placements:
            x0, y0 = x - quiet, y - quiet
            x1, y1 = x + side + quiet, y + side + quiet
            if x0 < -1e-6 or y0 < -1e-6 or x1 > self.sheet.width_mm + 1e-6 or y1 > self.sheet.height_mm + 1e-6:
                raise LayoutError(f"placement ({x:.2f},{y:.2f}) exceeds sheet bounds")
            cells.append((x0, y0, x1, y1))
        for i, a in enumerate(cells):
            for b in cells[i + 1:]:
                if a[0] < b[2] - 1e-6 and b[0] < a[2] - 1e-6 and a[1] < b[3] - 1e-6 and b[1] < a[3] - 1e-6:
                    raise LayoutError("quiet-zone cells overlap")

    def to_dict(self) -> dict:
        return {
            "sheet": {"name": self.sheet.name, "width_mm": self.sheet.width_mm,
                      "height_mm": self.sheet.height_mm},
            "version": self.params.version,
            "ecc": self.params.ecc.value,
            "module_mm": self.params.module_mm,
            "quiet_modules": self.params.quiet_modules,
            "cols": self.cols,
            "rows": self.rows,
            "placements": [list(p) for p in self.placements],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Layout":
        sheet = SheetSpec(d["sheet"]["name"], d["sheet"]["width_mm"], d["sheet"]["height_mm"])
        params = LayoutParams(version=d["version"], ecc=EccLevel.parse(d["ecc"]),
                              module_mm=d["module_mm"], quiet_modules=d["quiet_modules"])
        return cls(sheet=sheet, params=params, cols=d["cols"], rows=d["rows"],
                   placements=tuple((p[0], p[1]) for p in d["placements"]))


@dataclass(frozen=True)
class CapacityPlan:
    sheet: SheetSpec
    ecc: EccLevel
    version: int
    module_mm: float
    cols: int
    rows: int
    count: int
    per_code_chars: int
    total_chars: int
    layout: Layout = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "ecc": self.ecc.value,
            "module_mm": self.module_mm,
            "cols": self.cols,
            "rows": self.rows,
            "count": self.count,
            "per_code_chars": self.per_code_chars,
            "total_chars": self.total_chars,
            "layout": self.layout.to_dict(),
        }


def grid_fit(sheet: SheetSpec, version: int, module_mm: float,
             ecc: EccLevel = EccLevel.L,
             quiet_modules: int = DEFAULT_QUIET_MODULES) -> Layout:
    """Largest centred grid of identical symbols (with quiet zones) that
    fits the sheet; zero placements is a valid outcome."""
    params = LayoutParams(version=version, ecc=EccLevel.parse(ecc),
                          module_mm=module_mm, quiet_modules=quiet_modules)
    cell = params.cell_mm
    cols = floor_div(sheet.width_mm, cell)
    rows = floor_div(sheet.height_mm, cell)
    margin_x = (sheet.width_mm - cols * cell) / 2
    margin_y = (sheet.height_mm - rows * cell) / 2
    quiet = params.quiet_modules * params.module_mm
    placements = tuple(
        (margin_x + c * cell + quiet, margin_y + r * cell + quiet)
        for r in range(rows)
        for c in range(cols)
    )
    return Layout(sheet=sheet, params=params, cols=cols, rows=rows, placements=placements)


def max_capacity(sheet: SheetSpec, ecc: EccLevel | str, min_module_mm: float,
                 quiet_modules: int = DEFAULT_QUIET_MODULES) -> CapacityPlan:
    """Best byte-mode capacity over versions 1..7 at the smallest printable
    module size >= min_module_mm (snapped up to whole printer dots).

    Ties break toward the lower version: fewer, simpler symbols.
    """
    if min_module_mm <= 0:
        raise ValueError("min_module_mm must be positive")
    ecc = EccLevel.parse(ecc)
    module = snap_up_to_dots(min_module_mm)
    best: CapacityPlan | None = None
    for version in range(1, 8):
        layout = grid_fit(sheet, version, module, ecc, quiet_modules)
        per_code = capacity(version, ecc, "byte")
        total = layout.count * per_code
        plan = CapacityPlan(sheet=sheet, ecc=ecc, version=version, module_mm=module,
                            cols=layout.cols, rows=layout.rows, count=layout.count,
                            per_code_chars=per_code, total_chars=total, layout=layout)
        if best is None or total > best.total_chars:
            best = plan
    return best


def custom_region_layout(sheet: SheetSpec, rect_mm: tuple[float, float, float, float],
                         version: int, ecc: EccLevel | str,
                         min_module_mm: float,
                         quiet_modules: int = DEFAULT_QUIET_MODULES) -> Layout:
    """One symbol centred in a designated region, at the largest module size
    (on the 0.085 mm grid) whose symbol plus quiet zone fits the region."""
    x, y, w, h = rect_mm
    if w <= 0 or h <= 0:
        raise LayoutError("region must have positive size")
    if x < 0 or y < 0 or x + w > sheet.width_mm + 1e-6 or y + h > sheet.height_mm + 1e-6:
        raise LayoutError("region exceeds sheet bounds")
    ecc = EccLevel.parse(ecc)
    cell_modules = side_modules(version) + 2 * quiet_modules
    module = snap_down_to_grid(min(w, h) / cell_modules, MODULE_GRID_MM)
    if module < min_module_mm - 1e-9 or module <= 0:
        raise LayoutError(
            f"region {w:.1f}x{h:.1f} mm too small for version {version} at "
            f"module >= {min_module_mm} mm ({cell_modules} modules needed per side)"
        )
    params = LayoutParams(version=version, ecc=ecc, module_mm=module,
                          quiet_modules=quiet_modules)
    px = x + (w - params.symbol_mm) / 2
    py = y + (h - params.symbol_mm) / 2
    return Layout(sheet=sheet, params=params, cols=1, rows=1, placements=((px, py),))


# -- published detectability data -------------------------------------------

INK_CLASSES = (81, 102, 155)

# smallest decodable module (mm) measured per sheet preset, ink density
# class and ECC level, at full-sheet capture distance
DETECTABILITY_MM: dict[tuple[str, int, str], float] = {
    ("letter", 81, "L"): 1.27,
    ("letter", 81, "M"): 1.18,
    ("letter", 81, "H"): 1.18,
    ("letter", 102, "L"): 1.18,
    ("letter", 102, "M"): 1.18,
    ("letter", 102, "H"): 1.10,
    ("letter", 155, "L"): 1.18,
    ("letter", 155, "M"): 1.18,
    ("letter", 155, "H"): 1.10,
    ("half-letter", 81, "L"): 1.27,
    ("half-letter", 81, "M"): 0.93,
    ("half-letter", 81, "H"): 0.93,
    ("half-letter", 102, "L"): 1.01,
    ("half-letter", 102, "M"): 0.93,
    ("half-letter", 102, "H"): 0.93,
    ("half-letter", 155, "L"): 0.93,
    ("half-letter", 155, "M"): 0.93,
    ("half-letter", 155, "H"): 0.93,
}

# published whole-sheet byte-capacity figures for the same 18 configurations
PUBLISHED_CAPACITY: dict[tuple[str, int, str], int] = {
    ("letter", 81, "L"): 1800,
    ("letter", 81, "M"): 1600,
    ("letter", 81, "H"): 800,
    ("letter", 102, "L"): 2040,
    ("letter", 102, "M"): 1600,
    ("letter", 102, "H"): 1080,
    ("letter", 155, "L"): 2040,
    ("letter", 155, "M"): 1600,
    ("letter", 155, "H"): 1080,
    ("half-letter", 81, "L"): 900,
    ("half-letter", 81, "M"): 1224,
    ("half-letter", 81, "H"): 648,
    ("half-letter", 102, "L"): 1224,
    ("half-letter", 102, "M"): 1224,
    ("half-letter", 102, "H"): 648,
    ("half-letter", 155, "L"): 1560,
    ("half-letter", 155, "M"): 1224,
    ("half-letter", 155, "H"): 648,
}


def smallest_module(sheet: str | SheetSpec, ink_class: int, ecc: EccLevel | str) -> float:
    """Smallest decodable module size for a (sheet preset, ink class, ECC)
    configuration, from the embedded measurement table."""
    name = sheet.name if isinstance(sheet, SheetSpec) else SheetSpec.preset(sheet).name
    key = (name, int(ink_class), EccLevel.parse(ecc).value)
    if key not in DETECTABILITY_MM:
        raise KeyError(f"no detectability entry for {key}")
    return DETECTABILITY_MM[key]


def capacity_table_rows(quiet_modules: int = DEFAULT_QUIET_MODULES) -> list[dict]:
    """Reproduction of the published 18-row capacity comparison."""
    rows = []
    for sheet in (LETTER, HALF_LETTER):
        for ink in INK_CLASSES:
            for ecc_name in ("L", "M", "H"):
                key = (sheet.name, ink, ecc_name)
                mm = DETECTABILITY_MM[key]
                plan = max_capacity(sheet, ecc_name, mm, quiet_modules)
                published = PUBLISHED_CAPACITY[key]
                delta_pct = (plan.total_chars - published) * 100.0 / published
                rows.append({
                    "sheet": sheet.name,
                    "ink": ink,
                    "ecc": ecc_name,
                    "smallest_mm": mm,
                    "version": plan.version,
                    "codes": plan.count,
                    "chars": plan.total_chars,
                    "paper_chars": published,
                    "delta_pct": round(delta_pct, 2),
                })
    return rows
