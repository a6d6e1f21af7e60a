"""Invisible-ink density prediction for background colors.

A cubic polynomial in darkness K (percent) and relative luminance lum
(unitless), fitted to psychophysical detection thresholds, estimates how
much IR-absorbing ink a background color can hide. Predictions are then
snapped to one of three conservative density classes.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

# f(K, lum) with K on 0-100 and lum on 0-1
POLY_COEFFS = {
    "const": 113.7,
    "k": -0.1384,
    "lum": -25.43,
    "k2": 0.0081,
    "lum2": -0.5103,
    "k3": 0.0,
    "lum3": -0.0013,
}

# class bands over the predicted density and their conservative picks
CLASS_BOUNDS = (81.0, 102.0, 155.0, 200.0)
CLASS_DENSITY = (81, 102, 155)

# BT.709 luma weights on linear 0-1 channels
_LUM_WEIGHTS = (0.2126, 0.7152, 0.0722)


class InkClass(IntEnum):
    CLASS1 = 1
    CLASS2 = 2
    CLASS3 = 3


@dataclass(frozen=True)
class RgbColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for ch in (self.r, self.g, self.b):
            if not 0 <= ch <= 255:
                raise ValueError(f"channel {ch} outside 0..255")


@dataclass(frozen=True)
class ColorMetrics:
    k_percent: float
    luminance: float


@dataclass(frozen=True)
class InkRecommendation:
    predicted_percent: float
    class_id: InkClass
    recommended_percent: int
    clamped: bool = False


@dataclass(frozen=True)
class RegionAnalysis:
    rect: tuple[int, int, int, int]  # x, y, w, h in image pixels
    per_class_histogram: dict[InkClass, int]
    recommendation: InkRecommendation


def color_metrics(color: RgbColor | tuple[int, int, int]) -> ColorMetrics:
    if not isinstance(color, RgbColor):
        color = RgbColor(*color)
    k = (1.0 - max(color.r, color.g, color.b) / 255.0) * 100.0
    wr, wg, wb = _LUM_WEIGHTS
    lum = (wr * color.r + wg * color.g + wb * color.b) / 255.0
    return ColorMetrics(k_percent=k, luminance=lum)


def predict_density(metrics: ColorMetrics | tuple[float, float]) -> float:
    if isinstance(metrics, ColorMetrics):
        k, lum = metrics.k_percent, metrics.luminance
    else:
        k, lum = metrics
    c = POLY_COEFFS
    return (c["const"] + c["k"] * k + c["lum"] * lum + c["k2"] * k * k
            + c["lum2"] * lum * lum + c["k3"] * k ** 3 + c["lum3"] * lum ** 3)


def classify(predicted: float) -> InkRecommendation:
    """Snap a predicted density to its conservative class density.

    Out-of-band predictions are clamped to the nearest class and flagged
    rather than rejected, so authoring never dead-ends on a color.
    """
    lo, c2, c3, hi = CLASS_BOUNDS
    if predicted < lo:
        return InkRecommendation(predicted, InkClass.CLASS1, CLASS_DENSITY[0], clamped=True)
    if predicted > hi:
        return InkRecommendation(predicted, InkClass.CLASS3, CLASS_DENSITY[2], clamped=True)
    if predicted < c2:
        return InkRecommendation(predicted, InkClass.CLASS1, CLASS_DENSITY[0])
    if predicted < c3:
        return InkRecommendation(predicted, InkClass.CLASS2, CLASS_DENSITY[1])
    return InkRecommendation(predicted, InkClass.CLASS3, CLASS_DENSITY[2])


def recommend(color: RgbColor | tuple[int, int, int]) -> InkRecommendation:
    return classify(predict_density(color_metrics(color)))


def _predict_array(rgb: np.ndarray) -> np.ndarray:
    """Vectorised prediction over an (..., 3) uint8 array."""
    rgb = np.asarray(rgb, dtype=np.float64)
    k = (1.0 - rgb.max(axis=-1) / 255.0) * 100.0
    wr, wg, wb = _LUM_WEIGHTS
    lum = (wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]) / 255.0
    c = POLY_COEFFS
    return (c["const"] + c["k"] * k + c["lum"] * lum + c["k2"] * k * k
            + c["lum2"] * lum * lum + c["k3"] * k ** 3 + c["lum3"] * lum ** 3)


def classify_array(predicted: np.ndarray) -> np.ndarray:
    """Class ids (1..3) for an array of predicted densities."""
    _, c2, c3, _ = CLASS_BOUNDS
    out = np.ones(predicted.shape, dtype=np.int8)
    out[predicted >= c2] = 2
    out[predicted >= c3] = 3
    # clamped extremes still land in the edge classes
    out[predicted < CLASS_BOUNDS[0]] = 1
    out[predicted > CLASS_BOUNDS[3]] = 3
    return out


def analyze_region(image: np.ndarray, rect: tuple[int, int, int, int]) -> RegionAnalysis:
    """Classify every pixel of an (H, W, 3) image region; the region
    recommendation is the minimum recommended density over its pixels."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) RGB image")
    x, y, w, h = rect
    if w <= 0 or h <= 0:
        raise ValueError("region must be non-empty")
    if x < 0 or y < 0 or x + w > image.shape[1] or y + h > image.shape[0]:
        raise ValueError("region exceeds image bounds")

    patch = image[y:y + h, x:x + w, :]
    predicted = _predict_array(patch)
    classes = classify_array(predicted)
    hist = {InkClass(i): int((classes == i).sum()) for i in (1, 2, 3)}

    # conservative: the worst (lowest-prediction) pixel bounds the region;
    # classify is monotone, so it also carries the minimum class
    rec = classify(float(predicted.min()))
    return RegionAnalysis(rect=(x, y, w, h), per_class_histogram=hist, recommendation=rec)
