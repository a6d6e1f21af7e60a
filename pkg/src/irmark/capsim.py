"""Deterministic, seedable simulator of NIR captures of printed sheets.

The optical model is intentionally small: translucent CMY content barely
perturbs paper reflectance under NIR, while IR-ink modules drop it by a
per-density contrast. Captures then suffer perspective, blur, vignetting,
sensor noise and exposure jitter. Identical (ideal, params, seed) inputs
produce byte-identical frames, which is what makes this the reader's test
oracle.

Contrast-per-density values are calibration constants, not measurements;
they are chosen so the lowest ink density is the hardest to read, keeping
the qualitative ordering of the print experiments.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from .homography import solve_homography
from .separation import PrintJob
from .units import mm_to_px

PAPER_REFLECTANCE = 0.85
CMY_NIR_PERTURBATION = 0.02
SURROUND_REFLECTANCE = 0.10

# capture distance presets: full-sheet frames at the training scale
PRESET_FRAME_WIDTH_PX = {"letter": 600, "half-letter": 450}

DEFAULT_CONTRAST = {81: 0.10, 102: 0.14, 155: 0.22}


class SimParamError(ValueError):
    pass


@dataclass(frozen=True)
class JitterRanges:
    """Half-widths of per-capture exposure perturbations. Hue/saturation act
    on a monochrome sensor, so they collapse to small luminance-equivalent
    offset/gain terms."""

    brightness: float = 0.0
    contrast: float = 0.0
    hue: float = 0.0
    saturation: float = 0.0

    def __post_init__(self):
        for name in ("brightness", "contrast", "hue", "saturation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SimParamError(f"jitter range {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class CaptureParams:
    px_per_module: float = 6.0
    contrast: dict = field(default_factory=lambda: dict(DEFAULT_CONTRAST))
    blur_sigma: float = 0.0
    noise_sigma: float = 0.0
    vignette_strength: float = 0.0
    perspective: float = 0.0  # max corner offset, fraction of frame size
    jitter: JitterRanges = JitterRanges()
    seed: int = 0

    def __post_init__(self):
        if self.px_per_module <= 0:
            raise SimParamError("px_per_module must be positive")
        if sorted(self.contrast) != sorted(DEFAULT_CONTRAST):
            raise SimParamError(f"contrast must map the densities {tuple(DEFAULT_CONTRAST)}")
        c = self.contrast
        if not (0 < c[81] < c[102] < c[155] < 1):
            raise SimParamError("contrast must increase with ink density")
        if self.blur_sigma < 0 or self.noise_sigma < 0:
            raise SimParamError("blur/noise sigmas cannot be negative")
        if not 0.0 <= self.vignette_strength <= 1.0:
            raise SimParamError("vignette_strength outside [0, 1]")
        if not 0.0 <= self.perspective <= 0.2:
            raise SimParamError("perspective corner offsets above 20% are unsupported")

    def with_seed(self, seed) -> "CaptureParams":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "px_per_module": self.px_per_module,
            "contrast": {str(k): v for k, v in self.contrast.items()},
            "blur_sigma": self.blur_sigma,
            "noise_sigma": self.noise_sigma,
            "vignette_strength": self.vignette_strength,
            "perspective": self.perspective,
            "jitter": {
                "brightness": self.jitter.brightness,
                "contrast": self.jitter.contrast,
                "hue": self.jitter.hue,
                "saturation": self.jitter.saturation,
            },
            "seed": self.seed if isinstance(self.seed, int) else list(self.seed),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CaptureParams":
        if d.get("schema", 1) != 1:
            raise SimParamError(f"unsupported capture params schema {d.get('schema')}")
        jit = d.get("jitter", {})
        return cls(
            px_per_module=d.get("px_per_module", 6.0),
            contrast={int(k): v for k, v in d.get("contrast", DEFAULT_CONTRAST).items()},
            blur_sigma=d.get("blur_sigma", 0.0),
            noise_sigma=d.get("noise_sigma", 0.0),
            vignette_strength=d.get("vignette_strength", 0.0),
            perspective=d.get("perspective", 0.0),
            jitter=JitterRanges(**jit),
            seed=d.get("seed", 0),
        )


def preset_px_per_module(sheet_name: str, module_mm: float) -> float:
    """px/module when the named sheet preset fills its training-scale frame."""
    from .planner import SheetSpec

    sheet = SheetSpec.preset(sheet_name)
    width_px = PRESET_FRAME_WIDTH_PX[sheet.name]
    return width_px / sheet.width_mm * module_mm


@dataclass
class SimResult:
    image: np.ndarray  # (H, W) uint8
    homography: np.ndarray  # ideal -> frame coordinates
    corner_quad: np.ndarray  # frame positions of the ideal's corners
    applied: dict


def render_ideal(job: PrintJob, params: CaptureParams = CaptureParams()) -> np.ndarray:
    """Reflectance image of the printed sheet at capture resolution.

    Visible CMY content perturbs the paper level by at most
    CMY_NIR_PERTURBATION; IR modules subtract the per-density contrast.
    """
    manifest = job.manifest
    layout = manifest.get("layout") if manifest else None
    if layout is None:
        raise ValueError("print job manifest lacks layout information")
    dpi = manifest.get("dpi", 300)
    print_ppm = mm_to_px(layout["module_mm"], dpi)
    scale = params.px_per_module / print_ppm

    ir = job.ir.coverage.astype(np.float64)
    cmy_mean = job.cmy.coverage.mean(axis=2)
    cmy_uniform = float(cmy_mean.max() - cmy_mean.min()) == 0.0
    h, w = ir.shape
    out_h, out_w = max(1, round(h * scale)), max(1, round(w * scale))
    if (out_h, out_w) != (h, w):
        ys = (np.arange(out_h) + 0.5) / scale - 0.5
        xs = (np.arange(out_w) + 0.5) / scale - 0.5
        coords = np.meshgrid(ys, xs, indexing="ij")
        ir = map_coordinates(ir, coords, order=1, mode="nearest")
        if cmy_uniform:
            cmy_mean = np.full(ir.shape, float(cmy_mean.flat[0]))
        else:
            cmy_mean = map_coordinates(cmy_mean, coords, order=1, mode="nearest")

    drop = params.contrast[job.ir.density_percent]
    return PAPER_REFLECTANCE - CMY_NIR_PERTURBATION * cmy_mean - drop * ir


def _perspective_quad(shape: tuple[int, int], max_frac: float, rng) -> np.ndarray:
    h, w = shape
    corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    if max_frac == 0:
        return corners
    offsets = rng.uniform(-1.0, 1.0, size=(4, 2)) * [max_frac * w, max_frac * h]
    quad = corners + offsets
    # reject self-intersecting quads: successive edge cross products must
    # keep one sign
    cross = []
    for i in range(4):
        a = quad[(i + 1) % 4] - quad[i]
        b = quad[(i + 2) % 4] - quad[(i + 1) % 4]
        cross.append(a[0] * b[1] - a[1] * b[0])
    if not (all(c > 0 for c in cross) or all(c < 0 for c in cross)):
        raise SimParamError("degenerate perspective quad (self-intersecting)")
    return quad


def simulate_detailed(ideal: np.ndarray, params: CaptureParams,
                      seed=None) -> SimResult:
    """Full capture pipeline; see `simulate` for the image-only variant.

    Stage order: perspective warp, Gaussian blur, radial vignette, additive
    Gaussian noise, exposure jitter, quantization.
    """
    img = np.asarray(ideal, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("ideal image must be single-channel")
    rng = np.random.default_rng(params.seed if seed is None else seed)
    h, w = img.shape

    src_corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    quad = _perspective_quad((h, w), params.perspective, rng)
    if params.perspective > 0:
        hom = solve_homography(src_corners, quad)
        inv = np.linalg.inv(hom)
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        xx += 0.5
        yy += 0.5
        denom = inv[2, 0] * xx + inv[2, 1] * yy + inv[2, 2]
        sx = (inv[0, 0] * xx + inv[0, 1] * yy + inv[0, 2]) / denom
        sy = (inv[1, 0] * xx + inv[1, 1] * yy + inv[1, 2]) / denom
        img = map_coordinates(img, [sy - 0.5, sx - 0.5], order=1,
                              mode="constant", cval=SURROUND_REFLECTANCE)
    else:
        hom = np.eye(3)

    if params.blur_sigma > 0:
        img = gaussian_filter(img, params.blur_sigma, mode="nearest")

    if params.vignette_strength > 0:
        cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
        yy, xx = np.mgrid[0:h, 0:w]
        r2 = ((yy - cy) ** 2 + (xx - cx) ** 2) / (cy ** 2 + cx ** 2)
        img = img * (1.0 - params.vignette_strength * r2)

    if params.noise_sigma > 0:
        img = img + rng.normal(0.0, params.noise_sigma, img.shape)

    jit = params.jitter
    applied = {"brightness": 0.0, "contrast": 1.0}
    if jit.brightness or jit.contrast or jit.hue or jit.saturation:
        b = rng.uniform(-jit.brightness, jit.brightness) if jit.brightness else 0.0
        c = 1.0 + (rng.uniform(-jit.contrast, jit.contrast) if jit.contrast else 0.0)
        # monochrome sensor: hue/saturation fold into offset and gain
        b += 0.3 * (rng.uniform(-jit.hue, jit.hue) if jit.hue else 0.0)
        c *= 1.0 + 0.2 * (rng.uniform(-jit.saturation, jit.saturation) if jit.saturation else 0.0)
        img = (img - 0.5) * c + 0.5 + b
        applied = {"brightness": b, "contrast": c}

    out = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    return SimResult(image=out, homography=hom, corner_quad=quad, applied=applied)


def simulate(ideal: np.ndarray, params: CaptureParams, seed=None) -> np.ndarray:
    """8-bit capture frame; a pure function of (ideal, params, seed)."""
    return simulate_detailed(ideal, params, seed=seed).image


def augment_batch(ideal: np.ndarray, n: int, seed: int,
                  params: CaptureParams | None = None) -> list[np.ndarray]:
    """n captures with independent draws; image i depends only on (seed, i)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    params = params or CaptureParams()
    return [simulate(ideal, params, seed=[seed, i]) for i in range(n)]
