"""Classical binarization front end: CLAHE contrast boost and Sauvola
locally-adaptive thresholding, both pure numpy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BinarizeParams:
    clahe_tiles: tuple[int, int] = (8, 8)
    clahe_clip: float = 2.0
    sauvola_window: int = 31
    sauvola_k: float = 0.2
    sauvola_r: float = 128.0

    def __post_init__(self):
        if self.sauvola_window < 3 or self.sauvola_window % 2 == 0:
            raise ValueError("sauvola window must be odd and >= 3")
        if self.clahe_clip < 1.0:
            raise ValueError("clahe clip limit must be >= 1")
        if min(self.clahe_tiles) < 1:
            raise ValueError("tile grid must be positive")


DEFAULT_PARAMS = BinarizeParams()


def clahe(image: np.ndarray, params: BinarizeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Contrast-limited adaptive histogram equalization.

    Per-tile clipped histograms (clip limit relative to the uniform bin
    count, excess redistributed) build per-tile gray mappings; pixels blend
    the four surrounding tile mappings bilinearly.
    """
    img = np.asarray(image)
    if img.dtype != np.uint8:
        raise ValueError("expected a uint8 grayscale image")
    h, w = img.shape
    ty, tx = params.clahe_tiles
    if h < ty or w < tx:
        raise ValueError("image smaller than the tile grid")

    # tile boundaries cover the image without padding
    ys = np.linspace(0, h, ty + 1).astype(int)
    xs = np.linspace(0, w, tx + 1).astype(int)

    luts = np.empty((ty, tx, 256), dtype=np.float64)
    for i in range(ty):
        for j in range(tx):
            tile = img[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
            hist = np.bincount(tile.ravel(), minlength=256).astype(np.float64)
            n = tile.size
            clip = max(params.clahe_clip * n / 256.0, 1.0)
            excess = np.maximum(hist - clip, 0.0).sum()
            hist = np.minimum(hist, clip) + excess / 256.0
            cdf = np.cumsum(hist)
            luts[i, j] = (cdf / cdf[-1]) * 255.0

    # bilinear interpolation between tile centers
    cy = (ys[:-1] + ys[1:]) / 2.0
    cx = (xs[:-1] + xs[1:]) / 2.0
    yy = np.arange(h, dtype=np.float64)
    xx = np.arange(w, dtype=np.float64)

    iy = np.clip(np.searchsorted(cy, yy) - 1, 0, ty - 2) if ty > 1 else np.zeros(h, int)
    ix = np.clip(np.searchsorted(cx, xx) - 1, 0, tx - 2) if tx > 1 else np.zeros(w, int)
    if ty > 1:
        fy = np.clip((yy - cy[iy]) / (cy[iy + 1] - cy[iy]), 0.0, 1.0)
    else:
        fy = np.zeros(h)
    if tx > 1:
        fx = np.clip((xx - cx[ix]) / (cx[ix + 1] - cx[ix]), 0.0, 1.0)
    else:
        fx = np.zeros(w)

    iy2 = np.minimum(iy + 1, ty - 1)
    ix2 = np.minimum(ix + 1, tx - 1)
    vals = img.astype(int)
    gy, gx = np.meshgrid(iy, ix, indexing="ij")
    gy2, gx2 = np.meshgrid(iy2, ix2, indexing="ij")
    v00 = luts[gy, gx, vals]
    v01 = luts[gy, gx2, vals]
    v10 = luts[gy2, gx, vals]
    v11 = luts[gy2, gx2, vals]
    wy = fy[:, None]
    wx = fx[None, :]
    out = (v00 * (1 - wy) * (1 - wx) + v01 * (1 - wy) * wx
           + v10 * wy * (1 - wx) + v11 * wy * wx)
    return np.rint(out).clip(0, 255).astype(np.uint8)


def _window_sums(arr: np.ndarray, radius: int) -> np.ndarray:
    """Sum over a clamped (2r+1)^2 window via an integral image."""
    h, w = arr.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.float64)
    ii[1:, 1:] = np.cumsum(np.cumsum(arr, axis=0), axis=1)
    y0 = np.clip(np.arange(h) - radius, 0, h)
    y1 = np.clip(np.arange(h) + radius + 1, 0, h)
    x0 = np.clip(np.arange(w) - radius, 0, w)
    x1 = np.clip(np.arange(w) + radius + 1, 0, w)
    return (ii[y1[:, None], x1[None, :]] - ii[y0[:, None], x1[None, :]]
            - ii[y1[:, None], x0[None, :]] + ii[y0[:, None], x0[None, :]])


def _window_counts(shape: tuple[int, int], radius: int) -> np.ndarray:
    h, w = shape
    y0 = np.clip(np.arange(h) - radius, 0, h)
    y1 = np.clip(np.arange(h) + radius + 1, 0, h)
    x0 = np.clip(np.arange(w) - radius, 0, w)
    x1 = np.clip(np.arange(w) + radius + 1, 0, w)
    return (y1 - y0)[:, None] * (x1 - x0)[None, :]


def sauvola(image: np.ndarray, params: BinarizeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Locally-adaptive threshold T = m * (1 + k * (s / R - 1)).

    m and s are the window mean and standard deviation (integral-image
    computation); pixels darker than T are foreground (1 = ink).
    """
    img = np.asarray(image)
    if img.dtype != np.uint8:
        raise ValueError("expected a uint8 grayscale image")
    f = img.astype(np.float64)
    radius = params.sauvola_window // 2
    counts = _window_counts(f.shape, radius)
    mean = _window_sums(f, radius) / counts
    sq_mean = _window_sums(f * f, radius) / counts
    std = np.sqrt(np.maximum(sq_mean - mean * mean, 0.0))
    threshold = mean * (1.0 + params.sauvola_k * (std / params.sauvola_r - 1.0))
    return (f < threshold).astype(np.uint8)
