"""Plane-projective transforms shared by the capture simulator and reader."""
from __future__ import annotations

import numpy as np


def solve_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 matrix H with dst ~ H @ src for >= 4 point correspondences.

    Points are (N, 2); the DLT system is solved by least squares with the
    bottom-right element fixed at 1.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.shape[0] < 4:
        raise ValueError("need at least 4 matched points")
    n = src.shape[0]
    a = np.zeros((2 * n, 8))
    b = np.zeros(2 * n)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        b[2 * i] = u
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i + 1] = v
    h, *_ = np.linalg.lstsq(a, b, rcond=None)
    return np.append(h, 1.0).reshape(3, 3)


def apply_homography(h: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Transform (N, 2) points through a 3x3 homography."""
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    hom = np.hstack([pts, np.ones((pts.shape[0], 1))]) @ h.T
    out = hom[:, :2] / hom[:, 2:3]
    return out[0] if single else out
