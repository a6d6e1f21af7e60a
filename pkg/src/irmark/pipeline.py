"""End-to-end embedding: plan a sheet, split the payload, rasterize layers.

This is the glue the command line, the HTTP service and the round-trip
tests all share.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import payload as payload_mod
from . import planner, separation
from .inkmodel import analyze_region
from .qr import EccLevel, encode
from .units import DEFAULT_DPI


@dataclass
class EmbedResult:
    job: separation.PrintJob
    plan: planner.CapacityPlan
    chunks: payload_mod.ChunkSet
    density: int


def choose_density(image: np.ndarray | None) -> int:
    """Whole-image conservative ink density; blank sheets read as white."""
    if image is None:
        return 81
    analysis = analyze_region(image, (0, 0, image.shape[1], image.shape[0]))
    return analysis.recommendation.recommended_percent


def embed_document(
    data: bytes,
    sheet: planner.SheetSpec | str = planner.LETTER,
    ecc: EccLevel | str = EccLevel.L,
    density: int | None = None,
    image: np.ndarray | None = None,
    min_module_mm: float | None = None,
    dpi: int = DEFAULT_DPI,
) -> EmbedResult:
    """Plan, chunk, encode and rasterize a payload onto a sheet.

    The visible layer separates from `image` when given (scaled expectations:
    it must already match the sheet raster size) or defaults to a blank page.
    The smallest usable module comes from the detectability table for the
    chosen density unless overridden.
    """
    if isinstance(sheet, str):
        sheet = planner.SheetSpec.preset(sheet)
    ecc = EccLevel.parse(ecc)
    if density is None:
        density = choose_density(image)
    if density not in separation.IR_DENSITIES:
        raise ValueError(f"density must be one of {separation.IR_DENSITIES}")

    if min_module_mm is None:
        try:
            min_module_mm = planner.smallest_module(sheet, density, ecc)
        except KeyError:
            # no measurement for this (sheet, ecc); fall back to the most
            # conservative module on the sheet
            min_module_mm = max(
                v for (s, _i, _e), v in planner.DETECTABILITY_MM.items()
                if s == sheet.name
            )

    plan = planner.max_capacity(sheet, ecc, min_module_mm)
    chunks = payload_mod.chunk(data, plan)
    codes = [encode(c.data, plan.version, ecc) for c in chunks.chunks]
    ir = separation.compose_ir_layer(plan.layout, codes, density, dpi)

    height, width = ir.coverage.shape
    if image is None:
        rgb = np.full((height, width, 3), 255, dtype=np.uint8)
    else:
        rgb = np.asarray(image, dtype=np.uint8)
        if rgb.shape[:2] != (height, width):
            raise ValueError(
                f"visible image {rgb.shape[:2]} does not match sheet raster "
                f"({height}, {width}) at {dpi} dpi"
            )
    cmy = separation.rgb_to_cmy(rgb)

    manifest = separation.build_manifest(
        plan.layout, density, dpi, chunk_count=len(chunks), payload_bytes=len(data)
    )
    job = separation.PrintJob(cmy=cmy, ir=ir, manifest=manifest)
    return EmbedResult(job=job, plan=plan, chunks=chunks, density=density)
