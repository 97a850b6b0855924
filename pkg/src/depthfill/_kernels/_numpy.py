"""Pure-numpy implementation of the filter hot kernels.

Weight volumes are (K, H, W) float32 with K = (2r+1)^2 offset planes.
Plane k holds the weight toward neighbor offset (a, b) where
k = (2r+1)*(r+a) + (r+b), a = x offset, b = y offset. Entries whose
neighbor falls outside the raster are zero.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def offset_table(r: int) -> list[tuple[int, int]]:
    """Neighbor offsets (a, b) in plane-index order."""
    return [(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)]


def _spans(a: int, b: int, h: int, w: int):
    """Index ranges of source pixels whose (a, b) neighbor is in the raster."""
    y0, y1 = max(0, -b), h - max(0, b)
    x0, x1 = max(0, -a), w - max(0, a)
    return y0, y1, x0, x1


def color_weights(guide: np.ndarray, r: int, sigma_c: float) -> np.ndarray:
    h, w = guide.shape[:2]
    side = 2 * r + 1
    vol = np.zeros((side * side, h, w), dtype=np.float32)
    inv = np.float32(1.0 / (2.0 * sigma_c * sigma_c))
    for k, (a, b) in enumerate(offset_table(r)):
        y0, y1, x0, x1 = _spans(a, b, h, w)
        if y0 >= y1 or x0 >= x1:
            continue
        d = guide[y0:y1, x0:x1] - guide[y0 + b : y1 + b, x0 + a : x1 + a]
        ssd = np.einsum("ijc,ijc->ij", d, d)
        np.exp(-ssd * inv, out=vol[k, y0:y1, x0:x1])
    return vol


def apply_spatial(vol: np.ndarray, r: int, sigma_p: float) -> np.ndarray:
    offsets = np.asarray(offset_table(r), dtype=np.float32)
    sp = np.exp(-(offsets[:, 0] ** 2 + offsets[:, 1] ** 2) / np.float32(2.0 * sigma_p * sigma_p))
    return vol * sp.astype(np.float32)[:, None, None]


def scatter(
    depth: np.ndarray, mask: np.ndarray, vol: np.ndarray, r: int
) -> tuple[np.ndarray, np.ndarray]:
    h, w = depth.shape
    dhat = np.zeros((h, w), dtype=np.float32)
    wacc = np.zeros((h, w), dtype=np.float32)
    dm = np.where(mask != 0, depth, np.float32(0.0))
    bm = (mask != 0).astype(np.float32)
    for k, (a, b) in enumerate(offset_table(r)):
        y0, y1, x0, x1 = _spans(a, b, h, w)
        if y0 >= y1 or x0 >= x1:
            continue
        wk = vol[k, y0:y1, x0:x1]
        dhat[y0 + b : y1 + b, x0 + a : x1 + a] += dm[y0:y1, x0:x1] * wk
        wacc[y0 + b : y1 + b, x0 + a : x1 + a] += bm[y0:y1, x0:x1] * wk
    return dhat, wacc
