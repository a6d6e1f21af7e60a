"""Print-layer separation: a K-free CMY layer for the visible content and a
bilevel IR-ink layer for the hidden symbols, exported as a two-pass job.

The visible document prints from C/M/Y only (black comes from their mix, the
K channel stays empty); the K channel then carries IR-absorbing ink on a
second feed. Densities above 100 percent mean the IR pass itself runs twice.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .planner import Layout
from .qr import QrMatrix
from .units import DEFAULT_DPI, mm_to_px

IR_DENSITIES = (81, 102, 155)


@dataclass
class RgbImage:
    pixels: np.ndarray  # (H, W, 3) uint8
    dpi: int = DEFAULT_DPI

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError("expected an (H, W, 3) array")
        if self.pixels.dtype != np.uint8:
            raise ValueError("expected uint8 pixels")
        if self.dpi <= 0:
            raise ValueError("dpi must be positive")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class CmyImage:
    coverage: np.ndarray  # (H, W, 3) float64 in [0, 1], channels C, M, Y

    def __post_init__(self):
        self.coverage = np.asarray(self.coverage, dtype=np.float64)
        if self.coverage.ndim != 3 or self.coverage.shape[2] != 3:
            raise ValueError("expected an (H, W, 3) array")
        if self.coverage.min() < 0 or self.coverage.max() > 1:
            raise ValueError("coverage outside [0, 1]")

    @property
    def height(self) -> int:
        return self.coverage.shape[0]

    @property
    def width(self) -> int:
        return self.coverage.shape[1]


@dataclass
class IrLayer:
    coverage: np.ndarray  # (H, W) uint8, 1 = inked module
    density_percent: int

    def __post_init__(self):
        self.coverage = np.asarray(self.coverage, dtype=np.uint8)
        if self.coverage.ndim != 2:
            raise ValueError("expected an (H, W) array")
        if self.density_percent not in IR_DENSITIES:
            raise ValueError(f"density must be one of {IR_DENSITIES}")
        if self.coverage.max(initial=0) > 1:
            raise ValueError("coverage must be bilevel 0/1")

    @property
    def passes(self) -> int:
        return 2 if self.density_percent > 100 else 1


@dataclass
class PrintJob:
    cmy: CmyImage
    ir: IrLayer
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cmy.coverage.shape[:2] != self.ir.coverage.shape:
            raise ValueError("cmy and ir layer dimensions differ")


def rgb_to_cmy(image: RgbImage | np.ndarray) -> CmyImage:
    """K-free separation: full gray component replacement, K identically 0."""
    pixels = image.pixels if isinstance(image, RgbImage) else np.asarray(image)
    return CmyImage(coverage=1.0 - pixels.astype(np.float64) / 255.0)


def cmy_to_rgb(image: CmyImage, dpi: int = DEFAULT_DPI) -> RgbImage:
    """Inverse of rgb_to_cmy up to 8-bit rounding (used for previews)."""
    rgb = np.rint((1.0 - image.coverage) * 255.0).clip(0, 255).astype(np.uint8)
    return RgbImage(pixels=rgb, dpi=dpi)


def rasterize_symbol(code: QrMatrix, px_per_module: int) -> np.ndarray:
    if px_per_module < 1:
        raise ValueError("module rasterizes below one pixel")
    return np.kron(code.bits, np.ones((px_per_module, px_per_module), dtype=np.uint8))


def compose_ir_layer(layout: Layout, codes: list[QrMatrix], density: int,
                     dpi: int = DEFAULT_DPI) -> IrLayer:
    """Rasterize placed symbols onto a sheet-sized bilevel layer.

    `codes` pairs with layout.placements in order; a shorter list leaves the
    trailing positions blank (payloads rarely fill the whole grid).
    """
    if density not in IR_DENSITIES:
        raise ValueError(f"density must be one of {IR_DENSITIES}")
    if len(codes) > len(layout.placements):
        raise ValueError("more symbols than layout placements")
    ppm = mm_to_px(layout.params.module_mm, dpi)
    if ppm < 1:
        raise ValueError(
            f"module {layout.params.module_mm} mm rasterizes to <1 px at {dpi} dpi"
        )
    width = mm_to_px(layout.sheet.width_mm, dpi)
    height = mm_to_px(layout.sheet.height_mm, dpi)
    sheet = np.zeros((height, width), dtype=np.uint8)
    side = None
    for code, (x_mm, y_mm) in zip(codes, layout.placements):
        tile = rasterize_symbol(code, ppm)
        if side is None:
            side = tile.shape[0]
        elif tile.shape[0] != side:
            raise ValueError("all placed symbols must share one version")
        x, y = mm_to_px(x_mm, dpi), mm_to_px(y_mm, dpi)
        if x < 0 or y < 0 or y + side > height or x + side > width:
            raise ValueError("symbol raster exceeds sheet bounds")
        sheet[y:y + side, x:x + side] = tile
    return IrLayer(coverage=sheet, density_percent=density)


def layout_hash(layout: Layout) -> str:
    blob = json.dumps(layout.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def build_manifest(layout: Layout, density: int, dpi: int,
                   chunk_count: int, payload_bytes: int,
                   extra: dict | None = None) -> dict:
    manifest = {
        "schema": 1,
        "dpi": dpi,
        "sheet_mm": [layout.sheet.width_mm, layout.sheet.height_mm],
        "density_percent": density,
        "passes": 2 if density > 100 else 1,
        "layout": layout.to_dict(),
        "layout_hash": layout_hash(layout),
        "codec": {
            "version": layout.params.version,
            "ecc": layout.params.ecc.value,
            "mode": "byte",
        },
        "chunks": chunk_count,
        "payload_bytes": payload_bytes,
        "files": {"cmy": "cmy.png", "ir": "ir.png"},
    }
    if extra:
        manifest.update(extra)
    return manifest


def export_print_job(job: PrintJob, out_dir: str | Path) -> dict:
    """Write cmy.png, ir.png and manifest.json; byte-identical re-exports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cmy8 = np.rint(job.cmy.coverage * 255.0).astype(np.uint8)
    Image.fromarray(cmy8, mode="RGB").save(out / "cmy.png")

    ir8 = (job.ir.coverage * 255).astype(np.uint8)
    Image.fromarray(ir8, mode="L").save(out / "ir.png")

    manifest = dict(job.manifest)
    manifest.setdefault("density_percent", job.ir.density_percent)
    manifest.setdefault("passes", job.ir.passes)
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )
    return manifest


def load_print_job(export_dir: str | Path) -> PrintJob:
    """Reload an exported job (the simulator's input contract)."""
    d = Path(export_dir)
    manifest = json.loads((d / "manifest.json").read_text())
    cmy8 = np.asarray(Image.open(d / "cmy.png").convert("RGB"))
    ir8 = np.asarray(Image.open(d / "ir.png").convert("L"))
    return PrintJob(
        cmy=CmyImage(coverage=cmy8.astype(np.float64) / 255.0),
        ir=IrLayer(coverage=(ir8 > 127).astype(np.uint8),
                   density_percent=manifest["density_percent"]),
        manifest=manifest,
    )
